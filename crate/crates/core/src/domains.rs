//! Finite knob domains and detector domains.
//!
//! A domain is an ordered product of named factors, each carrying a finite
//! list of setting labels. Points of the product are enumerated in
//! lexicographic order: factor order first, then setting order, so flat
//! indices are reproducible across runs. Domains are ordered by factor
//! inclusion and form a distributive lattice under meet (shared factors)
//! and join (union of factors).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A setting label: free text or an exact rational. Rational labels compare
/// by reduced value, so `2/8` equals `1/4`; scenarios that use angles store
/// them as rational multiples of pi and evaluate trigonometry on demand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Ratio(i64, i64),
    Text(String),
}

impl Label {
    pub fn text(s: impl Into<String>) -> Self {
        Label::Text(s.into())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational label with zero denominator");
        let (n, d) = reduce(num, den);
        Label::Ratio(n, d)
    }

    /// Reduced (numerator, denominator) with positive denominator.
    pub fn as_ratio(&self) -> Option<(i64, i64)> {
        match self {
            Label::Ratio(n, d) => Some(reduce(*n, *d)),
            Label::Text(_) => None,
        }
    }

    fn valid(&self) -> bool {
        match self {
            Label::Ratio(_, d) => *d != 0,
            Label::Text(s) => !s.is_empty(),
        }
    }
}

fn reduce(num: i64, den: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    if num == 0 {
        return (0, 1);
    }
    let g = gcd(num, den);
    let sign = if den < 0 { -1 } else { 1 };
    (sign * num / g, sign * den / g)
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Label::Text(a), Label::Text(b)) => a == b,
            (Label::Ratio(..), Label::Ratio(..)) => self.as_ratio() == other.as_ratio(),
            _ => false,
        }
    }
}

impl Eq for Label {}

impl Hash for Label {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Label::Text(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            Label::Ratio(..) => {
                1u8.hash(state);
                self.as_ratio().hash(state);
            }
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Text(s) => write!(f, "{s}"),
            Label::Ratio(..) => {
                let (n, d) = self.as_ratio().expect("ratio label");
                if d == 1 {
                    write!(f, "{n}")
                } else {
                    write!(f, "{n}/{d}")
                }
            }
        }
    }
}

/// One named dimension of a domain: a knob or a detector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFactor")]
pub struct Factor {
    name: String,
    settings: Vec<Label>,
}

#[derive(Deserialize)]
struct RawFactor {
    name: String,
    settings: Vec<Label>,
}

impl TryFrom<RawFactor> for Factor {
    type Error = Error;

    fn try_from(raw: RawFactor) -> Result<Self> {
        Factor::new(raw.name, raw.settings)
    }
}

/// A single knob is a factor of a knob domain.
pub type Knob = Factor;
/// A single detector is a factor of a detector domain.
pub type Detector = Factor;

impl Factor {
    pub fn new(name: impl Into<String>, settings: Vec<Label>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidFactor("empty factor name".into()));
        }
        if settings.is_empty() {
            return Err(Error::InvalidFactor(format!("factor {name:?} has no settings")));
        }
        if settings.iter().any(|l| !l.valid()) {
            return Err(Error::InvalidFactor(format!(
                "factor {name:?} carries an invalid label"
            )));
        }
        for i in 0..settings.len() {
            for j in (i + 1)..settings.len() {
                if settings[i] == settings[j] {
                    return Err(Error::InvalidFactor(format!(
                        "factor {name:?} repeats setting {}",
                        settings[i]
                    )));
                }
            }
        }
        Ok(Factor { name, settings })
    }

    pub fn from_texts(name: impl Into<String>, labels: &[&str]) -> Result<Self> {
        Factor::new(name, labels.iter().map(|s| Label::text(*s)).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn settings(&self) -> &[Label] {
        &self.settings
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.settings.iter().position(|l| l == label)
    }
}

/// Marker for knob domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnobKind;
/// Marker for detector domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectorKind;

pub type KnobDomain = Domain<KnobKind>;
pub type DetectorDomain = Domain<DetectorKind>;

/// Ordered product of factors with pairwise distinct names.
#[derive(Serialize, Deserialize)]
#[serde(
    bound = "",
    into = "Vec<Factor>",
    try_from = "Vec<Factor>"
)]
pub struct Domain<M> {
    factors: Vec<Factor>,
    _kind: PhantomData<M>,
}

impl<M> Clone for Domain<M> {
    fn clone(&self) -> Self {
        Domain {
            factors: self.factors.clone(),
            _kind: PhantomData,
        }
    }
}

impl<M> fmt::Debug for Domain<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain").field("factors", &self.factors).finish()
    }
}

impl<M> PartialEq for Domain<M> {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl<M> Eq for Domain<M> {}

impl<M> From<Domain<M>> for Vec<Factor> {
    fn from(d: Domain<M>) -> Self {
        d.factors
    }
}

impl<M> TryFrom<Vec<Factor>> for Domain<M> {
    type Error = Error;

    fn try_from(factors: Vec<Factor>) -> Result<Self> {
        Domain::new(factors)
    }
}

impl<M> Domain<M> {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for i in 0..factors.len() {
            for j in (i + 1)..factors.len() {
                if factors[i].name == factors[j].name {
                    return Err(Error::DuplicateFactor(factors[i].name.clone()));
                }
            }
        }
        Ok(Domain {
            factors,
            _kind: PhantomData,
        })
    }

    /// The empty product: one point, no coordinates.
    pub fn empty() -> Self {
        Domain {
            factors: Vec::new(),
            _kind: PhantomData,
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, name: &str) -> Option<&Factor> {
        self.factors.iter().find(|f| f.name == name)
    }

    pub fn factor_position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    /// Number of points of the product; 1 for the empty domain.
    pub fn num_points(&self) -> usize {
        self.factors.iter().map(Factor::len).product()
    }

    /// Cartesian product. Factor lists concatenate, so the left operand is
    /// the most significant block of the lexicographic enumeration.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Domain::new(factors)
    }

    /// Inclusion order: every factor of `self` occurs in `other` with the
    /// same name and the same settings.
    pub fn leq(&self, other: &Self) -> bool {
        self.factors.iter().all(|f| {
            other
                .factor(&f.name)
                .is_some_and(|g| g.settings == f.settings)
        })
    }

    /// Same factor set regardless of order.
    pub fn same_factor_set(&self, other: &Self) -> bool {
        self.leq(other) && other.leq(self)
    }

    /// Greatest lower bound: factors present in both. Fails if a shared name
    /// carries different settings.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        let mut factors = Vec::new();
        for f in &self.factors {
            if let Some(g) = other.factor(&f.name) {
                if g.settings != f.settings {
                    return Err(Error::IncompatibleFactor(f.name.clone()));
                }
                factors.push(f.clone());
            }
        }
        factors.sort_by(|a, b| a.name.cmp(&b.name));
        Domain::new(factors)
    }

    /// Least upper bound: union of factors. Fails if a shared name carries
    /// different settings.
    pub fn join(&self, other: &Self) -> Result<Self> {
        let mut factors = self.factors.clone();
        for g in &other.factors {
            match self.factor(&g.name) {
                Some(f) if f.settings != g.settings => {
                    return Err(Error::IncompatibleFactor(g.name.clone()));
                }
                Some(_) => {}
                None => factors.push(g.clone()),
            }
        }
        factors.sort_by(|a, b| a.name.cmp(&b.name));
        Domain::new(factors)
    }

    /// Per-factor coordinates of a flat point index.
    pub fn decode(&self, index: usize) -> Vec<usize> {
        let mut coords = vec![0usize; self.factors.len()];
        let mut rest = index;
        for (pos, f) in self.factors.iter().enumerate().rev() {
            coords[pos] = rest % f.len();
            rest /= f.len();
        }
        coords
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.factors.len());
        let mut index = 0usize;
        for (f, &c) in self.factors.iter().zip(coords) {
            index = index * f.len() + c;
        }
        index
    }

    pub fn labels_at(&self, index: usize) -> Vec<&Label> {
        self.decode(index)
            .into_iter()
            .zip(&self.factors)
            .map(|(c, f)| &f.settings[c])
            .collect()
    }

    pub fn owned_labels_at(&self, index: usize) -> Vec<Label> {
        self.labels_at(index).into_iter().cloned().collect()
    }

    /// Flat index of a full label tuple, if present.
    pub fn find_point(&self, labels: &[Label]) -> Option<usize> {
        if labels.len() != self.factors.len() {
            return None;
        }
        let mut coords = Vec::with_capacity(labels.len());
        for (f, l) in self.factors.iter().zip(labels) {
            coords.push(f.index_of(l)?);
        }
        Some(self.encode(&coords))
    }

    /// Coordinatewise restriction of a point of `larger` onto `self`.
    /// Requires `self.leq(larger)`.
    pub fn project_point(&self, larger: &Self, index: usize) -> Result<usize> {
        if !self.leq(larger) {
            return Err(Error::NotIncluded);
        }
        if index >= larger.num_points() {
            return Err(Error::IndexOutOfRange {
                index,
                count: larger.num_points(),
            });
        }
        let coords = larger.decode(index);
        let mut own = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let pos = larger
                .factor_position(&f.name)
                .expect("leq guarantees presence");
            own.push(coords[pos]);
        }
        Ok(self.encode(&own))
    }

    /// Domain with one factor removed, plus its former position.
    pub fn without_factor(&self, name: &str) -> Result<(Self, usize)> {
        let pos = self
            .factor_position(name)
            .ok_or_else(|| Error::UnknownFactor(name.to_string()))?;
        let mut factors = self.factors.clone();
        factors.remove(pos);
        Ok((Domain::new(factors)?, pos))
    }

    /// Human-readable point, e.g. `(1/4, up)`.
    pub fn point_display(&self, index: usize) -> String {
        let labels: Vec<String> = self
            .labels_at(index)
            .into_iter()
            .map(Label::to_string)
            .collect();
        format!("({})", labels.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knob(name: &str, n: usize) -> Factor {
        Factor::new(
            name,
            (0..n).map(|i| Label::ratio(i as i64, n as i64)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn product_counts_multiply() {
        let a = KnobDomain::new(vec![knob("A", 2)]).unwrap();
        let b = KnobDomain::new(vec![knob("B", 3)]).unwrap();
        assert_eq!(a.product(&b).unwrap().num_points(), 6);
    }

    #[test]
    fn product_with_empty_is_identity() {
        let a = KnobDomain::new(vec![knob("A", 4)]).unwrap();
        let p = a.product(&KnobDomain::empty()).unwrap();
        assert_eq!(p, a);
        assert_eq!(KnobDomain::empty().num_points(), 1);
    }

    #[test]
    fn repeated_binary_product() {
        let mut d = KnobDomain::empty();
        for name in ["A", "B", "C"] {
            d = d
                .product(&KnobDomain::new(vec![knob(name, 2)]).unwrap())
                .unwrap();
        }
        assert_eq!(d.num_points(), 8);
    }

    #[test]
    fn duplicate_names_rejected() {
        let a = KnobDomain::new(vec![knob("A", 2)]).unwrap();
        assert!(matches!(
            a.product(&a),
            Err(Error::DuplicateFactor(_))
        ));
    }

    #[test]
    fn leq_examples() {
        let a = KnobDomain::new(vec![knob("A", 2)]).unwrap();
        let ab = KnobDomain::new(vec![knob("A", 2), knob("B", 3)]).unwrap();
        assert!(a.leq(&a));
        assert!(a.leq(&ab));
        assert!(!ab.leq(&a));

        // Same name, different settings: not included.
        let a3 = KnobDomain::new(vec![knob("A", 3)]).unwrap();
        let a2b = KnobDomain::new(vec![knob("A", 2), knob("B", 2)]).unwrap();
        assert!(!a3.leq(&a2b));
    }

    #[test]
    fn projection_restricts_coordinates() {
        let a = KnobDomain::new(vec![knob("A", 2)]).unwrap();
        let ab = KnobDomain::new(vec![knob("A", 2), knob("B", 3)]).unwrap();
        // Point (a=1, b=2) has flat index 1*3 + 2 = 5.
        assert_eq!(a.project_point(&ab, 5).unwrap(), 1);
        // Identity projection.
        assert_eq!(ab.project_point(&ab, 4).unwrap(), 4);

        let abc = ab
            .product(&KnobDomain::new(vec![knob("C", 2)]).unwrap())
            .unwrap();
        let idx = abc.encode(&[1, 2, 1]);
        assert_eq!(ab.project_point(&abc, idx).unwrap(), ab.encode(&[1, 2]));
    }

    #[test]
    fn projection_requires_inclusion() {
        let a3 = KnobDomain::new(vec![knob("A", 3)]).unwrap();
        let ab = KnobDomain::new(vec![knob("A", 2), knob("B", 3)]).unwrap();
        assert!(matches!(
            a3.project_point(&ab, 0),
            Err(Error::NotIncluded)
        ));
    }

    #[test]
    fn enumeration_is_lexicographic_and_stable() {
        let d = KnobDomain::new(vec![knob("A", 2), knob("B", 2)]).unwrap();
        let order: Vec<String> = (0..4).map(|i| d.point_display(i)).collect();
        assert_eq!(order, vec!["(0, 0)", "(0, 1/2)", "(1/2, 0)", "(1/2, 1/2)"]);
    }

    #[test]
    fn ratio_labels_reduce() {
        assert_eq!(Label::ratio(2, 8), Label::ratio(1, 4));
        assert_eq!(Label::ratio(-1, -4), Label::ratio(1, 4));
        assert_ne!(Label::ratio(1, 4), Label::text("1/4"));
        assert_eq!(Label::ratio(3, 1).to_string(), "3");
    }

    #[test]
    fn meet_join_give_lattice_bounds() {
        let ab = KnobDomain::new(vec![knob("A", 2), knob("B", 2)]).unwrap();
        let bc = KnobDomain::new(vec![knob("B", 2), knob("C", 2)]).unwrap();
        let meet = ab.meet(&bc).unwrap();
        let join = ab.join(&bc).unwrap();
        assert!(meet.leq(&ab) && meet.leq(&bc));
        assert!(ab.leq(&join) && bc.leq(&join));
        assert_eq!(meet.factors().len(), 1);
        assert_eq!(join.factors().len(), 3);

        let b3 = KnobDomain::new(vec![knob("B", 3)]).unwrap();
        assert!(matches!(ab.meet(&b3), Err(Error::IncompatibleFactor(_))));
    }
}
