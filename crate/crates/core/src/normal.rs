//! Standard normal CDF and quantiles.
//!
//! The CDF goes through erfc so both tails keep full relative precision; the
//! quantile uses Wichura's AS241 rational approximations (about 1e-16
//! relative accuracy).

use libm::erfc;

/// Smallest p-value reported; keeps quantiles finite.
pub const P_FLOOR: f64 = 1e-300;

/// Φ(x).
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// 1 − Φ(x).
pub fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Φ⁻¹(p) for p in (0, 1); ±∞ at the endpoints.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&CENTRAL_NUM, r) / poly(&CENTRAL_DEN, r);
    }
    // tail: work with the smaller of p and 1 - p
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let z = tail_quantile(tail);
    if q < 0.0 {
        -z
    } else {
        z
    }
}

/// Φ⁻¹(1 − p), accurate for small p without forming 1 − p.
pub fn upper_quantile(p: f64) -> f64 {
    if p < 0.075 {
        if p <= 0.0 {
            return f64::INFINITY;
        }
        tail_quantile(p)
    } else {
        -quantile(p)
    }
}

/// Positive z with upper tail probability `p` (p < 0.5).
fn tail_quantile(p: f64) -> f64 {
    let r = (-p.ln()).sqrt();
    if r <= 5.0 {
        let r = r - 1.6;
        poly(&INTER_NUM, r) / poly(&INTER_DEN, r)
    } else {
        let r = r - 5.0;
        poly(&FAR_NUM, r) / poly(&FAR_DEN, r)
    }
}

/// 2(1 − Φ(|t|)), clamped to [P_FLOOR, 1].
pub fn two_sided_p(t: f64) -> f64 {
    erfc(t.abs() / std::f64::consts::SQRT_2).clamp(P_FLOOR, 1.0)
}

/// Horner evaluation, coefficients in increasing degree.
fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const CENTRAL_NUM: [f64; 8] = [
    3.387_132_872_796_366_5,
    1.331_416_678_917_843_8e2,
    1.971_590_950_306_551_3e3,
    1.373_169_376_550_946e4,
    4.592_195_393_154_987e4,
    6.726_577_092_700_87e4,
    3.343_057_558_358_813e4,
    2.509_080_928_730_122_7e3,
];
const CENTRAL_DEN: [f64; 8] = [
    1.0,
    4.231_333_070_160_091e1,
    6.871_870_074_920_579e2,
    5.394_196_021_424_751e3,
    2.121_379_430_158_659_7e4,
    3.930_789_580_009_271e4,
    2.872_908_573_572_194_3e4,
    5.226_495_278_852_545e3,
];
const INTER_NUM: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_545,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    2.417_807_251_774_506e-1,
    2.272_384_498_926_918_4e-2,
    7.745_450_142_783_414e-4,
];
const INTER_DEN: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    6.897_673_349_851e-1,
    1.481_039_764_274_800_8e-1,
    1.519_866_656_361_645_7e-2,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const FAR_NUM: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    2.965_605_718_285_048_7e-1,
    2.653_218_952_657_612_4e-2,
    1.242_660_947_388_078_4e-3,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const FAR_DEN: [f64; 8] = [
    1.0,
    5.998_322_065_558_88e-1,
    1.369_298_809_227_358e-1,
    1.487_536_129_085_061_5e-2,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.043_631_033_057_136_3e-15,
];
