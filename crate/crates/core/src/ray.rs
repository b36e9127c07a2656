//! The symbolic rational-ray carrier: the one genuinely non-algebraic
//! instance. Closure takes a set of rationals up-closed, the
//! post-composed map opens the left end, so the hull of a finite set `F`
//! is the open ray above `min F`. The regular opens are exactly the open
//! rays and the whole line; membership, way-below and family sups are
//! decided on that closed grammar with exact arithmetic.

use std::fmt;
use std::str::FromStr;

use num::BigRational;

use crate::Error;

pub type Rat = BigRational;

/// Parses `p/q` or a plain integer.
pub fn parse_rat(text: &str) -> Result<Rat, Error> {
    Rat::from_str(text.trim())
        .map_err(|e| Error::parse(format!("bad rational {text:?}: {e}")))
}

/// A regular open of the ray carrier: an open ray or the whole line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayOpen {
    /// The open ray strictly above the endpoint.
    Ray(Rat),
    All,
}

impl fmt::Display for RayOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayOpen::Ray(a) => write!(f, "({a},inf)"),
            RayOpen::All => write!(f, "all"),
        }
    }
}

/// The input grammar for regularity questions: open rays, closed rays,
/// or the whole line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RaySet {
    Open(Rat),
    Closed(Rat),
    All,
}

impl fmt::Display for RaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaySet::Open(a) => write!(f, "({a},inf)"),
            RaySet::Closed(a) => write!(f, "[{a},inf)"),
            RaySet::All => write!(f, "all"),
        }
    }
}

impl FromStr for RaySet {
    type Err = Error;

    fn from_str(text: &str) -> Result<RaySet, Error> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("all") {
            return Ok(RaySet::All);
        }
        let (open, rest) = match t.as_bytes().first() {
            Some(b'(') => (true, &t[1..]),
            Some(b'[') => (false, &t[1..]),
            _ => return Err(Error::parse(format!("expected '(', '[' or 'all' in {t:?}"))),
        };
        let rest = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::parse(format!("missing ')' in {t:?}")))?;
        let (lo, hi) = rest
            .split_once(',')
            .ok_or_else(|| Error::parse(format!("missing ',' in {t:?}")))?;
        if !hi.trim().eq_ignore_ascii_case("inf") {
            return Err(Error::parse(format!("right endpoint must be inf in {t:?}")));
        }
        let a = parse_rat(lo)?;
        Ok(if open { RaySet::Open(a) } else { RaySet::Closed(a) })
    }
}

impl RaySet {
    pub fn as_open(&self) -> Option<RayOpen> {
        match self {
            RaySet::Open(a) => Some(RayOpen::Ray(a.clone())),
            RaySet::All => Some(RayOpen::All),
            RaySet::Closed(_) => None,
        }
    }
}

/// The hull of a finite nonempty set of rationals: the open ray above its
/// minimum.
pub fn ray_hull(f: &[Rat]) -> Result<RayOpen, Error> {
    let min = f.iter().min().ok_or(Error::EmptyF)?;
    Ok(RayOpen::Ray(min.clone()))
}

/// Open rays and the whole line are regular; closed rays are not (their
/// left endpoint cannot be trapped under any hull inside them).
pub fn ray_is_regular(u: &RaySet) -> bool {
    match u {
        RaySet::Open(_) | RaySet::All => true,
        RaySet::Closed(_) => false,
    }
}

/// Way-below on the regular rays: an open ray is way below another
/// exactly when its endpoint is strictly larger, and way below the whole
/// line always; the whole line is way below nothing.
pub fn ray_way_below(u1: &RayOpen, u2: &RayOpen) -> bool {
    match (u1, u2) {
        (RayOpen::Ray(a), RayOpen::Ray(b)) => b < a,
        (RayOpen::Ray(_), RayOpen::All) => true,
        (RayOpen::All, _) => false,
    }
}

/// Description of the family sups of `M` relative to `F` on the ray
/// carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RaySigma {
    /// No family sup exists (the case of an empty `M`).
    Empty,
    /// Exactly the finite sets whose minimum is the given rational.
    MinEquals(Rat),
}

impl fmt::Display for RaySigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RaySigma::Empty => write!(f, "empty"),
            RaySigma::MinEquals(m) => write!(f, "{{G : min G = {m}}}"),
        }
    }
}

/// Family sups of `M` under `F`: empty for an empty `M`, otherwise the
/// sets with minimum `min M`. Every element of `M` must lie strictly
/// above `min F`.
pub fn ray_sigma(f: &[Rat], m: &[Rat]) -> Result<RaySigma, Error> {
    let hull = ray_hull(f)?;
    let RayOpen::Ray(a) = &hull else { unreachable!() };
    for x in m {
        if x <= a {
            return Err(Error::MOutsideHull { value: x.to_string(), hull: hull.to_string() });
        }
    }
    Ok(match m.iter().min() {
        None => RaySigma::Empty,
        Some(min) => RaySigma::MinEquals(min.clone()),
    })
}

/// Inclusion on the ray grammar; used by the oracles below and the
/// command-line rendering.
pub fn ray_contains(outer: &RayOpen, inner: &RayOpen) -> bool {
    match (outer, inner) {
        (RayOpen::All, _) => true,
        (RayOpen::Ray(_), RayOpen::All) => false,
        (RayOpen::Ray(b), RayOpen::Ray(a)) => b <= a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, One, Zero};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    fn random_rat<R: Rng>(rng: &mut R) -> Rat {
        rat(rng.gen_range(-1000..1000), rng.gen_range(1..1000))
    }

    /// Unfolds the one-existential way-below characterization on rays:
    /// a finite set inside the outer ray whose hull covers the inner one.
    /// Density supplies the witness; the checks below validate it.
    fn way_below_oracle(u1: &RayOpen, u2: &RayOpen) -> bool {
        let witness: Option<Rat> = match (u1, u2) {
            (RayOpen::All, _) => None,
            (RayOpen::Ray(a), RayOpen::All) => Some(a.clone()),
            (RayOpen::Ray(a), RayOpen::Ray(b)) => {
                if b < a {
                    Some((a + b) / rat(2, 1))
                } else {
                    None
                }
            }
        };
        match witness {
            None => false,
            Some(c) => {
                // F = {c} must lie inside u2 and its hull must cover u1.
                let f_inside = match u2 {
                    RayOpen::All => true,
                    RayOpen::Ray(b) => &c > b,
                };
                let hull = ray_hull(std::slice::from_ref(&c)).unwrap();
                f_inside && ray_contains(&hull, u1)
            }
        }
    }

    #[test]
    fn hull_is_the_ray_above_the_minimum() {
        assert_eq!(ray_hull(&[rat(1, 1), rat(3, 1)]).unwrap(), RayOpen::Ray(rat(1, 1)));
        assert_eq!(ray_hull(&[rat(0, 1)]).unwrap(), RayOpen::Ray(Rat::zero()));
        assert_eq!(
            ray_hull(&[rat(-2, 1), rat(5, 1), rat(7, 1)]).unwrap(),
            RayOpen::Ray(rat(-2, 1))
        );
        assert!(matches!(ray_hull(&[]), Err(Error::EmptyF)));
    }

    #[test]
    fn regularity_on_the_grammar() {
        assert!(ray_is_regular(&RaySet::Open(Rat::zero())));
        assert!(!ray_is_regular(&RaySet::Closed(Rat::zero())));
        assert!(ray_is_regular(&RaySet::All));
    }

    #[test]
    fn regularity_witnesses_spot_checked() {
        // For the open ray above a and finite M inside it, the hull of
        // the midpoint of a and min M traps M inside the ray.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_rat(&mut rng);
            let m: Vec<Rat> = (0..rng.gen_range(1..4))
                .map(|_| &a + rat(rng.gen_range(1..100), rng.gen_range(1..100)))
                .collect();
            let min_m = m.iter().min().unwrap().clone();
            let c = (&a + &min_m) / rat(2, 1);
            assert!(c > a && c < min_m);
            let hull = ray_hull(std::slice::from_ref(&c)).unwrap();
            assert!(ray_contains(&RayOpen::Ray(a.clone()), &hull));
            assert!(m.iter().all(|x| match &hull {
                RayOpen::Ray(e) => x > e,
                RayOpen::All => true,
            }));
        }
        // The closed ray fails at its own endpoint: a hull containing the
        // endpoint must start strictly below it, leaving the closed ray.
        let a = Rat::zero();
        // Any candidate hull (c, inf) with c < a contains points below a.
        let c = &a - Rat::one();
        assert!(c < a);
        // (c, inf) is inside [a, inf) only when a <= c: contradiction.
        assert!(!(&a <= &c));
    }

    #[test]
    fn way_below_characterization_values() {
        assert!(ray_way_below(&RayOpen::Ray(rat(1, 1)), &RayOpen::Ray(Rat::zero())));
        assert!(!ray_way_below(&RayOpen::Ray(Rat::zero()), &RayOpen::Ray(Rat::zero())));
        assert!(ray_way_below(&RayOpen::Ray(rat(7, 2)), &RayOpen::All));
        assert!(!ray_way_below(&RayOpen::All, &RayOpen::All));
        assert!(!ray_way_below(&RayOpen::All, &RayOpen::Ray(Rat::zero())));
    }

    #[test]
    fn way_below_agrees_with_the_symbolic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let u1 = if rng.gen_bool(0.1) {
                RayOpen::All
            } else {
                RayOpen::Ray(random_rat(&mut rng))
            };
            let u2 = if rng.gen_bool(0.1) {
                RayOpen::All
            } else {
                RayOpen::Ray(random_rat(&mut rng))
            };
            assert_eq!(ray_way_below(&u1, &u2), way_below_oracle(&u1, &u2), "{u1} vs {u2}");
        }
    }

    #[test]
    fn way_below_is_irreflexive_on_open_rays() {
        // No compact elements: the carrier is continuous but nowhere
        // algebraic.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let u = RayOpen::Ray(random_rat(&mut rng));
            assert!(!ray_way_below(&u, &u));
        }
    }

    #[test]
    fn interpolation_by_midpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = 0;
        for _ in 0..1000 {
            let a = random_rat(&mut rng);
            let b = random_rat(&mut rng);
            let u = RayOpen::Ray(a.clone());
            let w = RayOpen::Ray(b.clone());
            if ray_way_below(&u, &w) {
                seen += 1;
                let v = RayOpen::Ray((&a + &b) / rat(2, 1));
                assert!(ray_way_below(&u, &v) && ray_way_below(&v, &w));
            }
        }
        assert!(seen > 100, "the sweep exercised the interpolation path");
    }

    #[test]
    fn directed_chain_joins() {
        // A finite descending chain of endpoints joins to the ray above
        // the least endpoint.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut endpoints: Vec<Rat> = (0..rng.gen_range(1..6)).map(|_| random_rat(&mut rng)).collect();
            endpoints.sort();
            endpoints.dedup();
            let least = endpoints[0].clone();
            let join = RayOpen::Ray(least.clone());
            for e in &endpoints {
                assert!(ray_contains(&join, &RayOpen::Ray(e.clone())));
            }
            // Any upper bound in the grammar contains the join.
            for e in &endpoints {
                let bound = RayOpen::Ray(e.clone());
                if endpoints.iter().all(|x| ray_contains(&bound, &RayOpen::Ray(x.clone()))) {
                    assert!(ray_contains(&bound, &join));
                }
            }
        }
    }

    #[test]
    fn sigma_of_the_empty_set_is_empty() {
        assert_eq!(ray_sigma(&[Rat::zero()], &[]).unwrap(), RaySigma::Empty);
    }

    #[test]
    fn sigma_collects_sets_with_the_least_minimum() {
        let s = ray_sigma(&[Rat::zero()], &[rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(s, RaySigma::MinEquals(rat(2, 1)));
        assert_eq!(s.to_string(), "{G : min G = 2}");
        assert!(matches!(
            ray_sigma(&[Rat::zero()], &[rat(-1, 1)]),
            Err(Error::MOutsideHull { .. })
        ));
    }

    #[test]
    fn sigma_member_satisfies_both_conditions() {
        // Spot-verify the two defining conditions for G = {1} against
        // F = {0}, M = {1}.
        let g = vec![Rat::one()];
        let f = vec![Rat::zero()];
        let m = vec![Rat::one()];
        let hull_g = ray_hull(&g).unwrap();
        let hull_m = ray_hull(&m).unwrap();
        let hull_f = ray_hull(&f).unwrap();
        // hull(M) inside hull(G), and G inside hull(F).
        assert!(ray_contains(&hull_g, &hull_m));
        assert!(g.iter().all(|x| match &hull_f {
            RayOpen::Ray(e) => x > e,
            RayOpen::All => true,
        }));
        // Minimality: any G1 with hull(M) inside hull(G1) inside hull(F)
        // has hull(G) inside hull(G1); endpoints g1 range over [0, 1].
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let g1 = rat(rng.gen_range(0..=100), 100);
            let hull_g1 = RayOpen::Ray(g1);
            if ray_contains(&hull_g1, &hull_m) && ray_contains(&hull_f, &hull_g1) {
                assert!(ray_contains(&hull_g1, &hull_g));
            }
        }
        assert_eq!(ray_sigma(&f, &m).unwrap(), RaySigma::MinEquals(Rat::one()));
    }

    #[test]
    fn grammar_parsing_roundtrip() {
        for text in ["(1,inf)", "[0,inf)", "all", "(-2/3,inf)"] {
            let parsed: RaySet = text.parse().unwrap();
            assert_eq!(parsed.to_string(), text);
        }
        assert!("(1,2)".parse::<RaySet>().is_err());
        assert!("{1}".parse::<RaySet>().is_err());
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
    }
}
