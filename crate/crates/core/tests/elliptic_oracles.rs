//! Independent oracles for the elliptic kernel: classical series
//! expansions for K(m) and high-resolution integration of the Jacobi ODE
//! system for sn. Neither shares code with the AGM/Landen implementation
//! under test.

use kdvrc_core::elliptic::{complete_elliptic_k, jacobi_sn, EllipticParameter};

/// K(m) by series. Maclaurin in m on [0, 1/2]:
///   K = (pi/2) sum h_n m^n,  h_n = ((2n-1)!!/(2n)!!)^2;
/// for m > 1/2 the logarithmic series in the complement m1 = 1 - m:
///   K = sum h_n m1^n (ln(4/sqrt(m1)) - d_n),  d_n = sum_{k<=n} 1/(k(2k-1)).
fn k_series(m: f64) -> f64 {
    if m <= 0.5 {
        let mut h = 1.0;
        let mut term_pow = 1.0;
        let mut sum = 1.0;
        for n in 1..200 {
            let nf = n as f64;
            h *= ((2.0 * nf - 1.0) / (2.0 * nf)).powi(2);
            term_pow *= m;
            let term = h * term_pow;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        std::f64::consts::FRAC_PI_2 * sum
    } else {
        let m1 = 1.0 - m;
        let big_l = (4.0 / m1.sqrt()).ln();
        let mut h = 1.0;
        let mut d = 0.0;
        let mut pow = 1.0;
        let mut sum = big_l;
        for n in 1..200 {
            let nf = n as f64;
            h *= ((2.0 * nf - 1.0) / (2.0 * nf)).powi(2);
            d += 1.0 / (nf * (2.0 * nf - 1.0));
            pow *= m1;
            let term = h * pow * (big_l - d);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    }
}

/// sn(theta, m) by RK4 on sn' = cn dn, cn' = -sn dn, dn' = -m sn cn.
fn sn_ode(theta: f64, m: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let sign = theta.signum();
    let theta = theta.abs();
    let steps = (theta / 2.5e-4).ceil() as usize;
    let h = theta / steps as f64;

    let rhs = |y: [f64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]];
    let mut y = [0.0, 1.0, 1.0];
    for _ in 0..steps {
        let k1 = rhs(y);
        let k2 = rhs([
            y[0] + 0.5 * h * k1[0],
            y[1] + 0.5 * h * k1[1],
            y[2] + 0.5 * h * k1[2],
        ]);
        let k3 = rhs([
            y[0] + 0.5 * h * k2[0],
            y[1] + 0.5 * h * k2[1],
            y[2] + 0.5 * h * k2[2],
        ]);
        let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]]);
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    sign * y[0]
}

fn param(m: f64) -> EllipticParameter {
    EllipticParameter::new(m).unwrap()
}

#[test]
fn series_oracle_reproduces_known_values() {
    // sanity-check the oracle itself before trusting it
    assert!((k_series(0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((k_series(0.5) - 1.8540746773013719).abs() < 1e-13);
    assert!((k_series(0.9) - 2.5780921133481733).abs() < 1e-13);
    // both branches agree where they meet (dK/dm ~ 0.85 there)
    assert!((k_series(0.5 - 1e-12) - k_series(0.5 + 1e-12)).abs() < 1e-11);
}

#[test]
fn complete_integral_matches_the_series() {
    // uniform sweep plus a cluster against the singular end
    let mut ms: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
    for i in 1..=40 {
        ms.push(1.0 - 1e-6 * 10f64.powf(5.0 * (1.0 - i as f64 / 40.0)));
    }
    for m in ms {
        let got = complete_elliptic_k(param(m)).unwrap();
        let want = k_series(m);
        assert!(
            (got - want).abs() < 1e-10,
            "K({m}): agm {got} vs series {want}"
        );
    }
}

#[test]
fn jacobi_sn_matches_the_ode_oracle() {
    let mut state = 0x853c49e6748fea9bu64;
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..250 {
        let m = (rnd() * (1.0 - 1e-6)).min(1.0 - 1e-6);
        let theta = 16.0 * rnd() - 8.0;
        let got = jacobi_sn(theta, param(m)).unwrap();
        let want = sn_ode(theta, m);
        assert!(
            (got - want).abs() < 1e-10,
            "sn({theta}, {m}): landen {got} vs ode {want}"
        );
    }
}
