//! Bundled example scenes.
//!
//! - `task1`: two independent super objects, one with a probabilistic location.
//! - `task2`: apple and flower that cannot both be taken; whichever is touched
//!   first releases a deer or a zombie that ruins the other.
//! - `teaser`: flower hiding a virus, a man in black and a wolf pack. Touching
//!   the flower first zombifies everyone; visiting the man first saves him
//!   while the wolves still turn.
//! - `banana`: a lone 70/30 banana/apple object.
//! - `triple`: three objects on one three-member entangler.

use crate::quantum::{Gate, QubitState};
use crate::scene::{
    AssetMeta, CharacterMode, CharacterNode, EntanglerNode, GateNode, NodeId, NodeKind,
    ObserverNode, PropertyValues, QubitNode, Relation, SceneGraph, StateDef, SuperObjectNode,
    SuperPropertyNode,
};

struct Builder {
    graph: SceneGraph,
}

impl Builder {
    fn new(seed: u64) -> Self {
        Builder {
            graph: SceneGraph::new(seed),
        }
    }

    fn asset(&mut self, name: &str, display: &str, shape: &str, footprint: [f64; 2]) -> &mut Self {
        self.graph.add_asset(name, AssetMeta::new(display, shape, footprint));
        self
    }

    fn add(&mut self, kind: NodeKind) -> NodeId {
        self.graph.add_node(kind).expect("fixture nodes are well-formed")
    }

    fn qubit(&mut self, initial: QubitState) -> NodeId {
        self.add(NodeKind::Qubit(QubitNode { initial }))
    }

    fn p0(&mut self, p0: f64) -> NodeId {
        self.qubit(QubitState::from_p0(p0).expect("fixture probability"))
    }

    fn gate(&mut self, input: NodeId, gate: Gate) -> NodeId {
        let id = self.add(NodeKind::Gate(GateNode { gate }));
        self.connect(input, id);
        id
    }

    fn connect(&mut self, from: NodeId, to: NodeId) {
        self.graph.connect(from, to).expect("fixture wiring is well-formed");
    }

    fn object(
        &mut self,
        label: &str,
        input: NodeId,
        state0: (&str, &str),
        state1: (&str, &str),
        interactable: bool,
        position: Option<[f64; 2]>,
    ) -> NodeId {
        let mut obj = SuperObjectNode::new(
            label,
            StateDef::new(state0.0, state0.1),
            StateDef::new(state1.0, state1.1),
        );
        obj.interactable = interactable;
        obj.position = position;
        let id = self.add(NodeKind::SuperObject(obj));
        self.connect(input, id);
        id
    }

    fn entangle(&mut self, members: &[NodeId], relation: Relation) -> NodeId {
        self.add(NodeKind::Entangler(EntanglerNode {
            members: members.to_vec(),
            relation,
        }))
    }

    fn observer(&mut self, target: NodeId) -> NodeId {
        self.add(NodeKind::Observer(ObserverNode { target: Some(target) }))
    }

    fn character(&mut self, spawn: [f64; 2]) -> NodeId {
        self.add(NodeKind::Character(CharacterNode {
            mode: CharacterMode::OnScreen,
            spawn,
        }))
    }

    fn finish(self) -> SceneGraph {
        self.graph
    }
}

/// Creature: 50% Horse / 50% Deer at (250, 250). Visitor: 25% Zombie / 75%
/// Spaceship, appearing at (200, 200) with 86% and (-320, -240) with 14%.
pub fn task1() -> SceneGraph {
    let mut b = Builder::new(1);
    b.asset("Horse", "Horse", "quadruped", [2.0, 1.0])
        .asset("Deer", "Deer", "quadruped", [1.5, 1.0])
        .asset("Zombie", "Zombie", "humanoid", [1.0, 1.0])
        .asset("Spaceship", "Spaceship", "vehicle", [4.0, 4.0]);

    let q1 = b.qubit(QubitState::ZERO);
    let h = b.gate(q1, Gate::Hadamard);
    let creature = b.object(
        "Creature",
        h,
        ("Horse", "Horse"),
        ("Deer", "Deer"),
        true,
        Some([250.0, 250.0]),
    );

    let q2 = b.p0(0.25);
    let visitor = b.object(
        "Visitor",
        q2,
        ("Zombie", "Zombie"),
        ("Spaceship", "Spaceship"),
        true,
        None,
    );
    let q3 = b.p0(0.86);
    let location = b.add(NodeKind::SuperProperty(SuperPropertyNode {
        values: PropertyValues::Location {
            value0: [200.0, 200.0],
            value1: [-320.0, -240.0],
        },
    }));
    b.connect(q3, location);
    b.connect(location, visitor);

    b.observer(creature);
    b.observer(visitor);
    b.character([0.0, 0.0]);
    b.finish()
}

/// Outcome 1 means "taken" for the apple and flower and "present" for the
/// deer and zombie.
pub fn task2() -> SceneGraph {
    let mut b = Builder::new(2);
    b.asset("Apple", "Apple", "prop", [0.3, 0.3])
        .asset("AppleCore", "Apple core", "prop", [0.2, 0.2])
        .asset("Flower", "Flower", "prop", [0.3, 0.3])
        .asset("WiltedFlower", "Trampled flower", "prop", [0.3, 0.3])
        .asset("Deer", "Deer", "quadruped", [1.5, 1.0])
        .asset("Zombie", "Zombie", "humanoid", [1.0, 1.0])
        .asset("Empty", "Nothing", "none", [0.0, 0.0]);

    let qa = b.qubit(QubitState::ZERO);
    let xa = b.gate(qa, Gate::PauliX);
    let apple = b.object(
        "Apple",
        xa,
        ("AppleCore", "Apple eaten"),
        ("Apple", "Apple taken"),
        true,
        Some([-150.0, 0.0]),
    );
    let qf = b.qubit(QubitState::ZERO);
    let xf = b.gate(qf, Gate::PauliX);
    let flower = b.object(
        "Flower",
        xf,
        ("WiltedFlower", "Flower destroyed"),
        ("Flower", "Flower taken"),
        true,
        Some([150.0, 0.0]),
    );
    let hidden = b.qubit(QubitState::ZERO);
    let deer = b.object(
        "Deer",
        hidden,
        ("Empty", "No deer"),
        ("Deer", "Deer"),
        false,
        Some([-250.0, 60.0]),
    );
    let zombie = b.object(
        "Zombie",
        hidden,
        ("Empty", "No zombie"),
        ("Zombie", "Zombie"),
        false,
        Some([250.0, 60.0]),
    );

    b.entangle(&[apple, flower], Relation::Opposite);
    b.entangle(&[apple, deer], Relation::Same);
    b.entangle(&[flower, zombie], Relation::Same);
    b.observer(apple);
    b.observer(flower);
    b.character([0.0, -200.0]);
    b.finish()
}

/// Reconstruction of the flower/man/wolves scene.
///
/// Three hidden objects (Spores, Infection, Outbreak) give two paths of equal
/// length between the flower and the man: an all-Same path through the
/// spores and the infection, and a path through the wolf pack and the
/// outbreak that ends in an Opposite link. The cycle is frustrated on
/// purpose. Breadth-first order with ascending ids lets the flower reach the
/// man through the infection first, while the man reaches the flower through
/// the wolves first. Object ids are assigned in creation order, which this
/// builder relies on.
pub fn teaser() -> SceneGraph {
    let mut b = Builder::new(3);
    b.asset("Flower", "Flower", "prop", [0.3, 0.3])
        .asset("Virus", "Virus", "particles", [0.5, 0.5])
        .asset("ManInBlack", "Man in black", "humanoid", [1.0, 1.0])
        .asset("Zombie", "Zombie", "humanoid", [1.0, 1.0])
        .asset("Wolves", "Wolf pack", "pack", [3.0, 2.0])
        .asset("ZombieWolves", "Zombie wolves", "pack", [3.0, 2.0])
        .asset("Empty", "Nothing", "none", [0.0, 0.0])
        .asset("Spores", "Spores", "particles", [1.0, 1.0])
        .asset("Outbreak", "Outbreak", "particles", [2.0, 2.0])
        .asset("Infection", "Infection", "particles", [1.0, 1.0]);

    let qf = b.qubit(QubitState::ZERO);
    let xf = b.gate(qf, Gate::PauliX);
    let flower = b.object("Flower", xf, ("Flower", "Flower"), ("Virus", "Virus"), true, Some([0.0, 120.0]));
    let qm = b.qubit(QubitState::ZERO);
    let man = b.object(
        "Man",
        qm,
        ("ManInBlack", "Man in black"),
        ("Zombie", "Zombie"),
        true,
        Some([-200.0, -40.0]),
    );
    let hidden = b.qubit(QubitState::ZERO);
    let hidden = b.gate(hidden, Gate::Hadamard);
    let spores = b.object("Spores", hidden, ("Empty", "Dormant spores"), ("Spores", "Airborne spores"), false, None);
    let outbreak = b.object("Outbreak", hidden, ("Empty", "Quiet"), ("Outbreak", "Outbreak"), false, None);
    let qw = b.qubit(QubitState::ZERO);
    let xw = b.gate(qw, Gate::PauliX);
    let wolves = b.object(
        "WolfPack",
        xw,
        ("Wolves", "Wolf pack"),
        ("ZombieWolves", "Zombie wolves"),
        true,
        Some([220.0, -60.0]),
    );
    let infection = b.object("Infection", hidden, ("Empty", "Healthy"), ("Infection", "Infection"), false, None);

    b.entangle(&[flower, spores, infection, man], Relation::Same);
    b.entangle(&[flower, wolves, outbreak], Relation::Same);
    b.entangle(&[outbreak, man], Relation::Opposite);
    b.observer(flower);
    b.observer(man);
    b.observer(wolves);
    b.character([0.0, -250.0]);
    b.finish()
}

pub fn banana() -> SceneGraph {
    let mut b = Builder::new(0);
    b.asset("Banana", "Banana", "prop", [0.2, 0.2])
        .asset("Apple", "Apple", "prop", [0.2, 0.2]);
    let q = b.p0(0.7);
    let fruit = b.object("Fruit", q, ("Banana", "Banana"), ("Apple", "Apple"), true, None);
    b.observer(fruit);
    b.finish()
}

/// X, Y and Z with their own qubits (`p0` each), joined by one entangler.
pub fn triple(p0: [f64; 3], relation: Relation) -> SceneGraph {
    let mut b = Builder::new(4);
    let mut ids = Vec::new();
    for (label, p) in ["X", "Y", "Z"].into_iter().zip(p0) {
        let q = b.p0(p);
        ids.push(b.object(label, q, ("A", "A"), ("B", "B"), true, None));
    }
    b.entangle(&ids, relation);
    b.finish()
}

/// Scenes written by the CLI's `fixtures` command.
pub fn bundled() -> Vec<(&'static str, SceneGraph)> {
    vec![
        ("task1.scene.json", task1()),
        ("task2.scene.json", task2()),
        ("teaser.scene.json", teaser()),
    ]
}
