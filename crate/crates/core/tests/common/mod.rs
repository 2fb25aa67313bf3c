#![allow(dead_code)]

use num_complex::Complex64 as C64;
use qfhe_core::{Circuit, Gate, PauliKey, RandomBitPair, StateVector};
use rand::Rng;

pub type Dense = Vec<Vec<C64>>;

const O: C64 = C64::new(0.0, 0.0);
const L: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn single(kind: &str) -> Dense {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        "X" => vec![vec![O, L], vec![L, O]],
        "Y" => vec![vec![O, c(0.0, -1.0)], vec![c(0.0, 1.0), O]],
        "Z" => vec![vec![L, O], vec![O, -L]],
        "H" => vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]],
        "P" => vec![vec![L, O], vec![O, c(0.0, 1.0)]],
        "R" => vec![vec![L, O], vec![O, c(h, h)]],
        "I" => vec![vec![L, O], vec![O, L]],
        _ => unreachable!(),
    }
}

pub fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|r| (0..dim).map(|c| if r == c { L } else { O }).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![O; n]; n];
    for r in 0..n {
        for k in 0..n {
            if a[r][k] == O {
                continue;
            }
            for c in 0..n {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    out
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (p, q) = (a.len(), b.len());
    let mut out = vec![vec![O; p * q]; p * q];
    for i in 0..p {
        for j in 0..p {
            for k in 0..q {
                for l in 0..q {
                    out[i * q + k][j * q + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn apply(m: &Dense, v: &[C64]) -> Vec<C64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `I ⊗ .. ⊗ G ⊗ .. ⊗ I` with qubit 0 leftmost.
pub fn embed(g: &Dense, w: usize, width: usize) -> Dense {
    let id = single("I");
    let mut m = identity(1);
    for q in 0..width {
        m = kron(&m, if q == w { g } else { &id });
    }
    m
}

/// CNOT as a permutation of basis states.
pub fn cnot(control: usize, target: usize, width: usize) -> Dense {
    let dim = 1 << width;
    let bit = |w: usize| 1usize << (width - 1 - w);
    let image = |i: usize| if i & bit(control) != 0 { i ^ bit(target) } else { i };
    (0..dim)
        .map(|row| (0..dim).map(|col| if image(col) == row { L } else { O }).collect())
        .collect()
}

pub fn gate_unitary(g: &Gate, width: usize) -> Dense {
    match *g {
        Gate::X(w) => embed(&single("X"), w, width),
        Gate::Y(w) => embed(&single("Y"), w, width),
        Gate::Z(w) => embed(&single("Z"), w, width),
        Gate::H(w) => embed(&single("H"), w, width),
        Gate::P(w) => embed(&single("P"), w, width),
        Gate::R(w) => embed(&single("R"), w, width),
        Gate::Cnot { control, target } => cnot(control, target, width),
    }
}

pub fn circuit_unitary(circuit: &Circuit) -> Dense {
    let width = circuit.width();
    let mut u = identity(1 << width);
    for g in circuit.gates() {
        u = matmul(&gate_unitary(g, width), &u);
    }
    u
}

/// Pauli mask `⊗ X^x Z^z` on all qubits.
pub fn mask(x: &[bool], z: &[bool]) -> Dense {
    let mut m = identity(1);
    for (&xb, &zb) in x.iter().zip(z) {
        let mut p = single("I");
        if xb {
            p = matmul(&p, &single("X"));
        }
        if zb {
            p = matmul(&p, &single("Z"));
        }
        m = kron(&m, &p);
    }
    m
}

pub fn basis_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// The `2^n x 2^n` action of `u` on the data register for a fixed encoding,
/// asserting that no amplitude leaks out of `|e⟩`.
pub fn data_block(u: &Dense, n: usize, encoding: &[bool]) -> Dense {
    let m = encoding.len();
    let cols = 1usize << m;
    let e = basis_index(encoding);
    let dim = 1usize << n;
    let mut out = vec![vec![O; dim]; dim];
    for j in 0..dim {
        for i in 0..(dim * cols) {
            let v = u[i][j * cols + e];
            if i % cols == e {
                out[i / cols][j] = v;
            } else {
                assert!(v.norm() < 1e-12, "circuit disturbs the encoding register");
            }
        }
    }
    out
}

pub fn state(v: Vec<C64>) -> StateVector {
    StateVector::from_amplitudes(v).unwrap()
}

pub fn random_state<R: Rng>(qubits: usize, rng: &mut R) -> StateVector {
    StateVector::random(qubits, rng).unwrap()
}

/// `|⟨a|b⟩|^2`.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

/// A random circuit over the full gate set that keeps the trailing `m`
/// qubits in their input basis state: the encoding qubits only see diagonal
/// gates or act as controls toward data qubits.
pub fn random_circuit<R: Rng>(n: usize, m: usize, len: usize, rng: &mut R) -> Circuit {
    let mut gates = Vec::with_capacity(len);
    while gates.len() < len {
        let on_data = m == 0 || rng.gen_bool(0.7);
        if on_data {
            let w = rng.gen_range(0..n);
            let g = match rng.gen_range(0..7) {
                0 => Gate::X(w),
                1 => Gate::Y(w),
                2 => Gate::Z(w),
                3 => Gate::H(w),
                4 => Gate::P(w),
                5 => Gate::R(w),
                _ if n > 1 => {
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= w {
                        t += 1;
                    }
                    Gate::Cnot { control: w, target: t }
                }
                _ => Gate::H(w),
            };
            gates.push(g);
        } else {
            let e = n + rng.gen_range(0..m);
            let t = rng.gen_range(0..n);
            match rng.gen_range(0..5) {
                0 => gates.push(Gate::Z(e)),
                1 => gates.push(Gate::P(e)),
                2 => gates.push(Gate::R(e)),
                3 => gates.push(Gate::Cnot { control: e, target: t }),
                _ => gates.extend([Gate::H(t), Gate::Cnot { control: e, target: t }, Gate::H(t)]),
            }
        }
    }
    gates.truncate(len);
    Circuit::with_gates(n, m, gates).unwrap()
}

pub fn random_bits<R: Rng>(len: usize, rng: &mut R) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

/// Key fold written out directly from the update table.
pub fn fold_key(
    mut x: Vec<bool>,
    mut z: Vec<bool>,
    gates: &[Gate],
    pairs: &[RandomBitPair],
) -> (Vec<bool>, Vec<bool>) {
    let mut pairs = pairs.iter();
    for g in gates {
        match *g {
            Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
            Gate::H(w) => std::mem::swap(&mut x[w], &mut z[w]),
            Gate::P(w) => z[w] ^= x[w],
            Gate::Cnot { control, target } => {
                z[control] ^= z[target];
                x[target] ^= x[control];
            }
            Gate::R(w) => {
                let p = pairs.next().expect("enough pairs");
                let (xw, zw) = (x[w], z[w]);
                x[w] = p.r ^ xw;
                z[w] = p.r_prime ^ xw ^ zw;
            }
        }
    }
    assert!(pairs.next().is_none(), "unused pairs");
    (x, z)
}

pub fn key_of(x: Vec<bool>, z: Vec<bool>, n: usize, m: usize) -> PauliKey {
    PauliKey::new(n, m, x, z).unwrap()
}
