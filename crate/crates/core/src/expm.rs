//! Dense complex matrix exponential by scaling and squaring with Padé
//! approximants (orders 3/5/7/9/13 selected from the 1-norm, Higham's
//! thresholds). All matrices here are small (tens of sites), so plain
//! `ndarray` products and an in-place LU solve are plenty.

use ndarray::Array2;
use num_complex::Complex64 as C64;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &Array2<C64>) -> f64 {
    let (_, cols) = a.dim();
    (0..cols)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum())
        .fold(0.0, f64::max)
}

fn eye(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

fn scaled(a: &Array2<C64>, s: f64) -> Array2<C64> {
    a.mapv(|z| z * s)
}

/// Solve A X = B by LU with partial pivoting, consuming A.
fn lu_solve(mut a: Array2<C64>, mut b: Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let rhs = b.ncols();
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for i in k + 1..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        assert!(best > 0.0, "singular Pade denominator");
        if piv != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            for j in 0..rhs {
                let t = b[(k, j)];
                b[(k, j)] = b[(piv, j)];
                b[(piv, j)] = t;
            }
        }
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            a[(i, k)] = f;
            for j in k + 1..n {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
            for j in 0..rhs {
                let bkj = b[(k, j)];
                b[(i, j)] -= f * bkj;
            }
        }
    }
    // back substitution
    for j in 0..rhs {
        for i in (0..n).rev() {
            let mut acc = b[(i, j)];
            for k in i + 1..n {
                acc -= a[(i, k)] * b[(k, j)];
            }
            b[(i, j)] = acc / a[(i, i)];
        }
    }
    b
}

/// (U, V) for the diagonal Padé approximant with coefficients `b`,
/// given precomputed even powers [I, A^2, A^4, ...].
fn pade_uv(a: &Array2<C64>, powers: &[Array2<C64>], b: &[f64]) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let mut odd = Array2::<C64>::zeros((n, n));
    let mut v = Array2::<C64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        odd = odd + scaled(p, b[2 * k + 1]);
        v = v + scaled(p, b[2 * k]);
    }
    (a.dot(&odd), v)
}

/// exp(A) for a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "expm needs a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return eye(n);
    }

    let a2 = a.dot(a);
    if norm <= THETA_9 {
        let (u, v) = if norm <= THETA_3 {
            pade_uv(a, &[eye(n), a2], &B3)
        } else if norm <= THETA_5 {
            let a4 = a2.dot(&a2);
            pade_uv(a, &[eye(n), a2, a4], &B5)
        } else if norm <= THETA_7 {
            let a4 = a2.dot(&a2);
            let a6 = a4.dot(&a2);
            pade_uv(a, &[eye(n), a2, a4, a6], &B7)
        } else {
            let a4 = a2.dot(&a2);
            let a6 = a4.dot(&a2);
            let a8 = a6.dot(&a2);
            pade_uv(a, &[eye(n), a2, a4, a6, a8], &B9)
        };
        return lu_solve(&v - &u, &v + &u);
    }

    // scale so the norm falls under the order-13 threshold, then square back
    let s = ((norm / THETA_13).log2().ceil()).max(0.0) as i32;
    let factor = 0.5f64.powi(s);
    let a_s = scaled(a, factor);
    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let b = &B13;
    let w1 = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let w2 = scaled(&a6, b[7]) + scaled(&a4, b[5]) + scaled(&a2, b[3]) + scaled(&eye(n), b[1]);
    let u = a_s.dot(&(a6.dot(&w1) + w2));
    let z1 = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = a6.dot(&z1)
        + scaled(&a6, b[6])
        + scaled(&a4, b[4])
        + scaled(&a2, b[2])
        + scaled(&eye(n), b[0]);

    let mut r = lu_solve(&v - &u, &v + &u);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}
