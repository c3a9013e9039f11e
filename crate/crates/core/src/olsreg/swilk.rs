//! Shapiro-Wilk W test for normality, valid for sample sizes 3..=5000.
//!
//! Follows Royston's 1995 approximation (the AS R94 structure): Blom-type
//! order-statistic coefficients normalized in the first one or two positions,
//! then polynomial transforms of W to a standard normal deviate for the
//! p-value. Small-sample (n <= 11) and large-sample branches differ, and
//! n = 3 has a closed form.

use crate::error::Error;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

/// Ascending-coefficient polynomial evaluation.
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Inverse standard normal CDF (the AS 111 rational approximation; accuracy
/// around 1e-7, which the W coefficients were calibrated against).
fn ppnd(p: f64) -> f64 {
    const SPLIT: f64 = 0.42;
    const A0: f64 = 2.50662823884;
    const A1: f64 = -18.61500062529;
    const A2: f64 = 41.39119773534;
    const A3: f64 = -25.44106049637;
    const B1: f64 = -8.47351093090;
    const B2: f64 = 23.08336743743;
    const B3: f64 = -21.06224101826;
    const B4: f64 = 3.13082909833;
    const C0: f64 = -2.78718931138;
    const C1: f64 = -2.29796479134;
    const C2: f64 = 4.85014127135;
    const C3: f64 = 2.32121276858;
    const D1: f64 = 3.54388924762;
    const D2: f64 = 1.63706781897;
    let q = p - 0.5;
    if q.abs() <= SPLIT {
        let r = q * q;
        q * (((A3 * r + A2) * r + A1) * r + A0) / ((((B4 * r + B3) * r + B2) * r + B1) * r + 1.0)
    } else {
        let mut r = if q > 0.0 { 1.0 - p } else { p };
        if r <= 0.0 {
            return 0.0;
        }
        r = (-r.ln()).sqrt();
        let v = (((C3 * r + C2) * r + C1) * r + C0) / ((D2 * r + D1) * r + 1.0);
        if q < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Standard normal tail probability (the AS 66 approximation). With `upper`
/// set, returns P(Z > x); otherwise P(Z <= x).
fn alnorm(x: f64, upper: bool) -> f64 {
    const LTONE: f64 = 7.0;
    const UTZERO: f64 = 38.0;
    const CON: f64 = 1.28;
    const A1: f64 = 0.398942280444;
    const A2: f64 = 0.399903438504;
    const A3: f64 = 5.75885480458;
    const A4: f64 = 29.8213557808;
    const A5: f64 = 2.62433121679;
    const A6: f64 = 48.6959930692;
    const A7: f64 = 5.92885724438;
    const B1: f64 = 0.398942280385;
    const B2: f64 = 3.8052e-8;
    const B3: f64 = 1.00000615302;
    const B4: f64 = 3.98064794e-4;
    const B5: f64 = 1.98615381364;
    const B6: f64 = 0.151679116635;
    const B7: f64 = 5.29330324926;
    const B8: f64 = 4.8385912808;
    const B9: f64 = 15.1508972451;
    const B10: f64 = 0.742380924027;
    const B11: f64 = 30.789933034;
    const B12: f64 = 3.99019417011;

    let mut up = upper;
    let mut z = x;
    if z < 0.0 {
        up = !up;
        z = -z;
    }
    let tail = if z <= LTONE || (up && z <= UTZERO) {
        let y = 0.5 * z * z;
        if z <= CON {
            0.5 - z * (A1 - A2 * y / (y + A3 - A4 / (y + A5 + A6 / (y + A7))))
        } else {
            B1 * (-y).exp()
                / (z - B2
                    + B3 / (z + B4
                        + B5 / (z - B6
                            + B7 / (z + B8 - B9 / (z + B10 + B11 / (z + B12))))))
        }
    } else {
        0.0
    };
    if up {
        tail
    } else {
        1.0 - tail
    }
}

/// Computes (W, p) for a sample of 3..=5000 finite values with nonzero range.
pub fn shapiro_wilk(sample: &[f64]) -> Result<(f64, f64), Error> {
    let n = sample.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::SampleOutOfRange { n, min: 3, max: 5000 });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData("normality-test sample"));
    }
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let range = x[n - 1] - x[0];
    if range == 0.0 {
        return Err(Error::ZeroVariance);
    }

    let an = n as f64;
    let nn2 = n / 2;
    let mut a = vec![0.0_f64; nn2];
    if n == 3 {
        a[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        // Blom-type raw coefficients (negative lower-half quantiles), then
        // the Royston renormalization of the first one or two entries.
        let an25 = an + 0.25;
        let mut summ2 = 0.0;
        for (i, ai) in a.iter_mut().enumerate() {
            *ai = ppnd(((i + 1) as f64 - 0.375) / an25);
            summ2 += *ai * *ai;
        }
        summ2 *= 2.0;
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) - a[0] / ssumm2;
        let (i1, fac) = if n > 5 {
            let a2 = -a[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            a[1] = a2;
            (2, fac)
        } else {
            (1, ((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1)).sqrt())
        };
        a[0] = a1;
        for ai in a.iter_mut().skip(i1) {
            *ai = -*ai / fac;
        }
    }

    // Stored weights are the positive upper-half coefficients; position i
    // gets -a[i] in the lower half, +a[n-1-i] in the upper, 0 in the middle.
    let eff = |i: usize| {
        let j = n - 1 - i;
        if i < j {
            -a[i]
        } else if i > j {
            a[j]
        } else {
            0.0
        }
    };

    // Range-scaled, mean-centered accumulation keeps the quotient stable.
    let mut sx = 0.0;
    let mut sa = 0.0;
    for (i, xi) in x.iter().enumerate() {
        sx += xi / range;
        sa += eff(i);
    }
    let sx = sx / an;
    let sa = sa / an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        let asa = eff(i) - sa;
        let xsx = xi / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = (1.0 - w1).clamp(0.0, 1.0);

    let p = if n == 3 {
        let w3 = w.max(0.75);
        let pi6 = 6.0 / std::f64::consts::PI;
        let stqr = std::f64::consts::FRAC_PI_3;
        (pi6 * (w3.sqrt().asin() - stqr)).clamp(0.0, 1.0)
    } else {
        let y = (1.0 - w).ln();
        if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                1e-19
            } else {
                let y = -(gamma - y).ln();
                alnorm((y - poly(&C3, an)) / poly(&C4, an).exp(), true)
            }
        } else {
            let ln_n = an.ln();
            alnorm((y - poly(&C5, ln_n)) / poly(&C6, ln_n).exp(), true)
        }
    };
    Ok((w, if n == 3 { p } else { p.clamp(0.0, 1.0) }))
}
