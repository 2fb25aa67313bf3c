//! The shipped gate-selector menus.

use qfhe_core::{Gate, Program, QfheError, SelectorFixture};

fn p(label: &str, gates: Vec<Gate>) -> Program {
    Program::new(label, gates)
}

/// `(file stem, data qubits, menu)` for every fixture written by `demo`.
pub fn menus() -> Vec<(&'static str, usize, Vec<Program>)> {
    let id = Program::identity;
    vec![
        ("menu_ix", 1, vec![id(), p("X", vec![Gate::X(0)])]),
        ("menu_iz", 1, vec![id(), p("Z", vec![Gate::Z(0)])]),
        ("menu_ip", 1, vec![id(), p("P", vec![Gate::P(0)])]),
        (
            "pauli_1q",
            1,
            vec![
                id(),
                p("X", vec![Gate::X(0)]),
                p("Z", vec![Gate::Z(0)]),
                p("Y", vec![Gate::Y(0)]),
            ],
        ),
        (
            "phase_flip_1q",
            1,
            vec![
                id(),
                p("P", vec![Gate::P(0)]),
                p("X", vec![Gate::X(0)]),
                p("XP", vec![Gate::P(0), Gate::X(0)]),
            ],
        ),
        (
            "and_x",
            1,
            vec![id(), id(), id(), p("X", vec![Gate::X(0)])],
        ),
        (
            "pauli_2q",
            2,
            vec![
                id(),
                p("X1", vec![Gate::X(0)]),
                p("Z2", vec![Gate::Z(1)]),
                p("X1Z2", vec![Gate::X(0), Gate::Z(1)]),
            ],
        ),
        (
            "phase_2q",
            2,
            vec![
                id(),
                p("P2", vec![Gate::P(1)]),
                p("P1", vec![Gate::P(0)]),
                p("P1P2", vec![Gate::P(0), Gate::P(1)]),
            ],
        ),
    ]
}

pub fn fixtures() -> Result<Vec<(&'static str, SelectorFixture)>, QfheError> {
    menus()
        .into_iter()
        .map(|(name, n, menu)| Ok((name, SelectorFixture::build(n, menu)?)))
        .collect()
}
