//! Index-coding instances: classical side information (ICSI) and coded side
//! information (ICCSI), plus linear-code validity and decoding.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::digraph::{Digraph, Hyperarc, Hypergraph};
use crate::field::FieldSpec;
use crate::matrix::{express_in_rows, unit, FqMatrix, LinAlgError};
use crate::subspace::Subspace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("instance is not in canonical form (needs m = n and f = identity)")]
    NotCanonical,
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("receiver {0} cannot decode")]
    NotDecodable(usize),
}

/// Classical instance: receiver `i` wants message `f[i]` and holds `side_info[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IcsiInstance {
    n: usize,
    t: usize,
    f: Vec<usize>,
    side_info: Vec<Vec<usize>>,
}

impl IcsiInstance {
    /// All indices 0-based.
    pub fn new(n: usize, t: usize, f: Vec<usize>, side_info: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        if f.len() != side_info.len() {
            return Err(InstanceError::Invalid(format!(
                "{} demands but {} side-information sets",
                f.len(),
                side_info.len()
            )));
        }
        if t == 0 {
            return Err(InstanceError::Invalid("block length t must be positive".into()));
        }
        let mut clean = Vec::with_capacity(side_info.len());
        for (i, (&fi, xi)) in f.iter().zip(side_info).enumerate() {
            if fi >= n || xi.iter().any(|&j| j >= n) {
                return Err(InstanceError::Invalid(format!("receiver {i} refers to a message outside [n]")));
            }
            let mut xi = xi;
            xi.sort_unstable();
            xi.dedup();
            if xi.contains(&fi) {
                return Err(InstanceError::Invalid(format!("receiver {i} already holds its demand")));
            }
            clean.push(xi);
        }
        Ok(IcsiInstance { n, t, f, side_info: clean })
    }

    /// Canonical instance with `f = id` from 1-based side-information lists.
    pub fn canonical_one_based(side_info: &[&[usize]]) -> Result<Self, InstanceError> {
        let n = side_info.len();
        let sets = side_info
            .iter()
            .map(|s| s.iter().map(|&j| j.checked_sub(1).ok_or_else(|| InstanceError::Invalid("labels start at 1".into()))).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        Self::new(n, 1, (0..n).collect(), sets)
    }

    pub fn from_digraph(g: &Digraph) -> Self {
        let side_info = (0..g.n()).map(|v| g.out_neighbors(v)).collect();
        IcsiInstance { n: g.n(), t: 1, f: (0..g.n()).collect(), side_info }
    }

    pub fn from_hypergraph(h: &Hypergraph) -> Self {
        IcsiInstance {
            n: h.n(),
            t: 1,
            f: h.hyperarcs().iter().map(|e| e.tail).collect(),
            side_info: h.hyperarcs().iter().map(|e| e.head.clone()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn demand(&self, i: usize) -> usize {
        self.f[i]
    }

    pub fn side_info(&self, i: usize) -> &[usize] {
        &self.side_info[i]
    }

    pub fn is_canonical(&self) -> bool {
        self.m() == self.n && self.f.iter().enumerate().all(|(i, &fi)| i == fi)
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        let arcs = (0..self.m())
            .map(|i| Hyperarc { tail: self.f[i], head: self.side_info[i].clone() })
            .collect();
        Hypergraph::new(self.n, arcs).expect("validated on construction")
    }

    pub fn to_digraph(&self) -> Result<Digraph, InstanceError> {
        if !self.is_canonical() {
            return Err(InstanceError::NotCanonical);
        }
        let arcs: Vec<_> = (0..self.n).flat_map(|i| self.side_info[i].iter().map(move |&j| (i, j))).collect();
        Digraph::new(self.n, &arcs).map_err(|e| InstanceError::Invalid(e.to_string()))
    }

    /// The coded-side-information form: `V_S = I`, `R_i = e_f(i)`, and
    /// `V^(i)` the unit vectors of the held messages.
    pub fn embed(&self, field: &FieldSpec) -> IccsiInstance {
        let n = self.n;
        let vs = FqMatrix::identity(field, n);
        let v = self
            .side_info
            .iter()
            .map(|xi| FqMatrix::from_rows(field, n, &xi.iter().map(|&j| unit(n, j)).collect::<Vec<_>>()))
            .collect();
        let r = FqMatrix::from_rows(field, n, &self.f.iter().map(|&j| unit(n, j)).collect::<Vec<_>>());
        IccsiInstance::new(field.clone(), self.t, vs, v, r).expect("embedding of a valid instance is valid")
    }
}

/// Coded-side-information instance `(X, X^(S), R)`. Receiver `i` holds
/// `V^(i) X` and wants `R_i X`; the sender can transmit any `L V_S X`.
#[derive(Clone, Debug)]
pub struct IccsiInstance {
    field: FieldSpec,
    t: usize,
    vs: FqMatrix,
    v: Vec<FqMatrix>,
    r: FqMatrix,
    sender: Subspace,
    side: Vec<Subspace>,
}

impl PartialEq for IccsiInstance {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.t == o.t && self.vs == o.vs && self.v == o.v && self.r == o.r
    }
}

impl Eq for IccsiInstance {}

impl IccsiInstance {
    pub fn new(
        field: FieldSpec,
        t: usize,
        vs: FqMatrix,
        v: Vec<FqMatrix>,
        r: FqMatrix,
    ) -> Result<Self, InstanceError> {
        let n = vs.cols();
        let bad = |msg: String| Err(InstanceError::Invalid(msg));
        if t == 0 {
            return bad("block length t must be positive".into());
        }
        if vs.field() != &field || r.field() != &field || v.iter().any(|m| m.field() != &field) {
            return Err(InstanceError::LinAlg(LinAlgError::FieldMismatch));
        }
        if r.cols() != n || v.iter().any(|m| m.cols() != n) {
            return bad(format!("all matrices need {n} columns"));
        }
        if v.len() != r.rows() {
            return bad(format!("{} side-information matrices for {} receivers", v.len(), r.rows()));
        }
        let sender = Subspace::row_space(&vs);
        let side: Vec<Subspace> = v.iter().map(Subspace::row_space).collect();
        for i in 0..r.rows() {
            if !sender.contains(r.row(i)) {
                return bad(format!("request of receiver {} is outside the sender space", i + 1));
            }
            if side[i].contains(r.row(i)) {
                return bad(format!("receiver {} already knows its request", i + 1));
            }
        }
        Ok(IccsiInstance { field, t, vs, v, r, sender, side })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.vs.cols()
    }

    pub fn m(&self) -> usize {
        self.r.rows()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn vs(&self) -> &FqMatrix {
        &self.vs
    }

    pub fn v(&self, i: usize) -> &FqMatrix {
        &self.v[i]
    }

    pub fn r(&self) -> &FqMatrix {
        &self.r
    }

    pub fn request(&self, i: usize) -> &[u32] {
        self.r.row(i)
    }

    /// `X^(S)`, the sender's space.
    pub fn sender_space(&self) -> &Subspace {
        &self.sender
    }

    /// `X^(i)`, receiver `i`'s side-information space.
    pub fn side_space(&self, i: usize) -> &Subspace {
        &self.side[i]
    }

    pub fn d_sender(&self) -> usize {
        self.sender.dim()
    }

    pub fn d(&self, i: usize) -> usize {
        self.side[i].dim()
    }

    /// Number of distinct side-information spaces.
    pub fn distinct_side_spaces(&self) -> usize {
        let mut seen: Vec<&Subspace> = Vec::new();
        for s in &self.side {
            if !seen.contains(&s) {
                seen.push(s);
            }
        }
        seen.len()
    }

    /// Same instance over an extension field.
    pub fn extend_to(&self, big: &FieldSpec) -> Result<IccsiInstance, InstanceError> {
        let map = self
            .field
            .embedding_into(big)
            .map_err(|e| InstanceError::Invalid(e.to_string()))?;
        IccsiInstance::new(
            big.clone(),
            self.t,
            self.vs.map_into(big, &map),
            self.v.iter().map(|m| m.map_into(big, &map)).collect(),
            self.r.map_into(big, &map),
        )
    }

    /// Checks decodability for an encoder given by its rows in `F_q^n`.
    /// Every row must lie in the sender space.
    pub fn validate_code(&self, encoder: &FqMatrix) -> Result<Validity, InstanceError> {
        if encoder.cols() != self.n() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "encoder has {} columns, instance has n = {}",
                encoder.cols(),
                self.n()
            ))
            .into());
        }
        if encoder.field() != &self.field {
            return Err(LinAlgError::FieldMismatch.into());
        }
        for r in 0..encoder.rows() {
            if !self.sender.contains(encoder.row(r)) {
                return Err(InstanceError::Invalid(format!("encoder row {} is outside the sender space", r + 1)));
            }
        }
        let witnesses = (0..self.m())
            .map(|i| {
                let stacked = encoder.vstack(&self.v[i])?;
                Ok(express_in_rows(&stacked, self.request(i))?.map(|y| {
                    let (b, a) = y.split_at(encoder.rows());
                    Witness { b: b.to_vec(), a: a.to_vec() }
                }))
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Ok(Validity { encoder: encoder.clone(), witnesses })
    }

    /// Checks an encoder `L` with `d_S` columns; the transmitted rows are `L V_S`.
    pub fn validate_sender_code(&self, l: &FqMatrix) -> Result<Validity, InstanceError> {
        if l.cols() != self.vs.rows() {
            return Err(LinAlgError::DimensionMismatch(format!(
                "sender encoder has {} columns, V_S has {} rows",
                l.cols(),
                self.vs.rows()
            ))
            .into());
        }
        self.validate_code(&l.mul(&self.vs)?)
    }
}

/// Coefficients with `R_i = b·L + a·V^(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub b: Vec<u32>,
    pub a: Vec<u32>,
}

/// Result of a validity check, keeping per-receiver decoding witnesses.
#[derive(Clone, Debug)]
pub struct Validity {
    pub encoder: FqMatrix,
    pub witnesses: Vec<Option<Witness>>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }

    /// Receivers (0-based) that cannot decode.
    pub fn failures(&self) -> Vec<usize> {
        (0..self.witnesses.len()).filter(|&i| self.witnesses[i].is_none()).collect()
    }

    /// `R_i X = b·Y + a·Λ^(i)` from the received `Y = L X` and `Λ^(i) = V^(i) X`.
    pub fn decode(&self, i: usize, y: &FqMatrix, lambda: &FqMatrix) -> Result<Vec<u32>, InstanceError> {
        let w = self.witnesses.get(i).and_then(Option::as_ref).ok_or(InstanceError::NotDecodable(i))?;
        let f = y.field();
        let mut out = y.left_mul_vec(&w.b);
        let side = lambda.left_mul_vec(&w.a);
        for (o, s) in out.iter_mut().zip(side) {
            *o = f.add(*o, s);
        }
        Ok(out)
    }
}

/// Any instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Icsi(IcsiInstance),
    Iccsi(IccsiInstance),
}

impl Instance {
    /// The coded-side-information view; ICSI files are embedded over `field`.
    pub fn to_iccsi(&self, field: &FieldSpec) -> IccsiInstance {
        match self {
            Instance::Icsi(i) => i.embed(field),
            Instance::Iccsi(i) => i.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IcsiRepr {
    n: usize,
    m: usize,
    t: usize,
    f: Vec<usize>,
    side_info: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct IccsiRepr {
    field: FieldSpec,
    n: usize,
    m: usize,
    t: usize,
    #[serde(rename = "VS")]
    vs: Vec<Vec<u32>>,
    #[serde(rename = "V")]
    v: Vec<Vec<Vec<u32>>>,
    #[serde(rename = "R")]
    r: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum InstanceRepr {
    Icsi(IcsiRepr),
    Iccsi(IccsiRepr),
}

impl IcsiInstance {
    fn repr(&self) -> IcsiRepr {
        IcsiRepr {
            n: self.n,
            m: self.m(),
            t: self.t,
            f: self.f.iter().map(|x| x + 1).collect(),
            side_info: self.side_info.iter().map(|s| s.iter().map(|x| x + 1).collect()).collect(),
        }
    }

    fn from_repr(r: IcsiRepr) -> Result<Self, InstanceError> {
        if r.f.len() != r.m {
            return Err(InstanceError::Invalid(format!("m = {} but {} demands", r.m, r.f.len())));
        }
        let dec = |x: usize| x.checked_sub(1).ok_or_else(|| InstanceError::Invalid("labels start at 1".into()));
        let f = r.f.into_iter().map(dec).collect::<Result<_, _>>()?;
        let side = r
            .side_info
            .into_iter()
            .map(|s| s.into_iter().map(dec).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        IcsiInstance::new(r.n, r.t, f, side)
    }
}

impl IccsiInstance {
    fn repr(&self) -> IccsiRepr {
        IccsiRepr {
            field: self.field.clone(),
            n: self.n(),
            m: self.m(),
            t: self.t,
            vs: self.vs.row_vecs(),
            v: self.v.iter().map(FqMatrix::row_vecs).collect(),
            r: self.r.row_vecs(),
        }
    }

    fn from_repr(r: IccsiRepr) -> Result<Self, InstanceError> {
        let f = &r.field;
        let matrix = |rows: &[Vec<u32>]| -> Result<FqMatrix, InstanceError> {
            let entries: Vec<u32> = rows.iter().flatten().copied().collect();
            if rows.iter().any(|row| row.len() != r.n) {
                return Err(InstanceError::Invalid(format!("every matrix row needs n = {} entries", r.n)));
            }
            if let Some(&e) = entries.iter().find(|&&e| e >= f.q()) {
                return Err(InstanceError::Invalid(format!("entry {e} is not an element of GF({})", f.q())));
            }
            Ok(FqMatrix::from_rows(f, r.n, rows))
        };
        let vs = matrix(&r.vs)?;
        let v = r.v.iter().map(|m| matrix(m)).collect::<Result<Vec<_>, _>>()?;
        let req = matrix(&r.r)?;
        let inst = IccsiInstance::new(r.field.clone(), r.t, vs, v, req)?;
        if inst.n() != r.n || inst.m() != r.m {
            return Err(InstanceError::Invalid(format!(
                "declared n={}, m={} but matrices give n={}, m={}",
                r.n,
                r.m,
                inst.n(),
                inst.m()
            )));
        }
        Ok(inst)
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Instance::Icsi(i) => InstanceRepr::Icsi(i.repr()).serialize(s),
            Instance::Iccsi(i) => InstanceRepr::Iccsi(i.repr()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match InstanceRepr::deserialize(d)? {
            InstanceRepr::Icsi(r) => IcsiInstance::from_repr(r).map(Instance::Icsi).map_err(D::Error::custom),
            InstanceRepr::Iccsi(r) => IccsiInstance::from_repr(r).map(Instance::Iccsi).map_err(D::Error::custom),
        }
    }
}

impl Serialize for IcsiInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstanceRepr::Icsi(self.repr()).serialize(s)
    }
}

impl Serialize for IccsiInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstanceRepr::Iccsi(self.repr()).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> IcsiInstance {
        IcsiInstance::canonical_one_based(&[&[2, 3], &[6, 7], &[5, 7], &[2, 5], &[1, 6], &[3, 4], &[1, 4]]).unwrap()
    }

    #[test]
    fn hypergraph_and_digraph_views() {
        let inst = fano();
        let h = inst.to_hypergraph();
        assert_eq!(h.m(), 7);
        assert_eq!(h.hyperarcs()[0], Hyperarc { tail: 0, head: vec![1, 2] });
        let g = inst.to_digraph().unwrap();
        assert_eq!(g.out_neighbors(0), vec![1, 2]);
        let lone = IcsiInstance::new(1, 1, vec![0], vec![vec![]]).unwrap();
        assert_eq!(lone.to_hypergraph().hyperarcs()[0].head, Vec::<usize>::new());
        let noncanonical = IcsiInstance::new(2, 1, vec![0, 0], vec![vec![1], vec![]]).unwrap();
        assert_eq!(noncanonical.to_digraph(), Err(InstanceError::NotCanonical));
    }

    #[test]
    fn rejects_demand_in_side_info() {
        assert!(IcsiInstance::new(2, 1, vec![0], vec![vec![0]]).is_err());
    }

    #[test]
    fn embedding_dimensions() {
        let f = FieldSpec::prime(2).unwrap();
        let e = fano().embed(&f);
        assert!((0..7).all(|i| e.d(i) == 2));
        assert_eq!(e.d_sender(), 7);
        let bare = IcsiInstance::new(2, 1, vec![0, 1], vec![vec![], vec![]]).unwrap().embed(&f);
        assert_eq!(bare.v(0).rows(), 0);
    }

    #[test]
    fn validity_basics() {
        let f = FieldSpec::prime(2).unwrap();
        let e = fano().embed(&f);
        assert!(e.validate_code(&FqMatrix::identity(&f, 7)).unwrap().is_valid());
        let zero = e.validate_code(&FqMatrix::zeros(&f, 1, 7)).unwrap();
        assert_eq!(zero.failures().len(), 7);
        assert!(e.validate_code(&FqMatrix::identity(&f, 6)).is_err());
    }

    #[test]
    fn decode_identity() {
        let f = FieldSpec::prime(3).unwrap();
        let inst = IcsiInstance::canonical_one_based(&[&[2], &[]]).unwrap().embed(&f);
        let v = inst.validate_code(&FqMatrix::identity(&f, 2)).unwrap();
        let x = FqMatrix::from_rows(&f, 1, &[vec![2], vec![1]]);
        let lambda0 = inst.v(0).mul(&x).unwrap();
        assert_eq!(v.decode(0, &x, &lambda0).unwrap(), vec![2]);
    }

    #[test]
    fn json_round_trip_both_kinds() {
        let inst = Instance::Icsi(fano());
        let s = serde_json::to_string(&inst).unwrap();
        assert!(s.starts_with(r#"{"type":"icsi","n":7,"m":7,"t":1,"f":[1,2"#));
        assert_eq!(serde_json::from_str::<Instance>(&s).unwrap(), inst);

        let f = FieldSpec::of_order(4).unwrap();
        let coded = Instance::Iccsi(fano().embed(&f));
        let s = serde_json::to_string(&coded).unwrap();
        assert!(s.contains(r#""type":"iccsi""#) && s.contains(r#""VS""#));
        assert_eq!(serde_json::from_str::<Instance>(&s).unwrap(), coded);
    }
}
