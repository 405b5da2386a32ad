//! Linear index codes built from bound certificates: clique covers, local
//! and partitioned local clique covers over MDS codes, partition multicast,
//! and plain linear encoders. Each scheme encodes a message matrix `X`
//! (`n × r` sub-packets) and decodes receiver by receiver.

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clique::{Bound, Certificate, CoverEntry, GroupEntry};
use crate::digraph::{bits, full_mask};
use crate::field::FieldSpec;
use crate::instance::{IccsiInstance, InstanceError, Validity};
use crate::lp::Rational;
use crate::matrix::{dot, express_in_rows, solve, FqMatrix};
use crate::mds::{rs_generator, MdsError};
use crate::minrank::{multicast_matrix, MinRankError};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("no field extension up to GF({0}) supports the scheme: {1}")]
    FieldTooSmall(u32, String),
    #[error("certificate does not fit this scheme: {0}")]
    Certificate(String),
    #[error("encoder does not decode for receivers {0:?}")]
    NotDecodable(Vec<usize>),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeKind {
    Linear,
    CliqueCover,
    LocalClique,
    PartitionMulticast,
    UnmixedMulticast,
    PartitionedLocal,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Linear => "linear",
            SchemeKind::CliqueCover => "clique",
            SchemeKind::LocalClique => "local",
            SchemeKind::PartitionMulticast => "multicast",
            SchemeKind::UnmixedMulticast => "multicast-unmixed",
            SchemeKind::PartitionedLocal => "partitioned-local",
        }
    }
}

/// One use of a clique's coding vector, evaluated on column `column` of `H`.
#[derive(Clone, Debug)]
struct CliqueCopy {
    members: u64,
    vector: Vec<u32>,
    column: usize,
}

/// A copy of a receiver group with its inner MDS code `G` (`t̂ × s`).
#[derive(Clone, Debug)]
struct GroupCopy {
    members: u64,
    cliques: Vec<CliqueCopy>,
    g: FqMatrix,
}

#[derive(Clone, Debug)]
enum Body {
    Linear { validity: Validity },
    Cliques { copies: Vec<GroupCopy>, h: FqMatrix },
    Multicast { copies: Vec<(u64, usize)>, encoders: Vec<FqMatrix>, g: FqMatrix },
    Unmixed { copies: Vec<(u64, usize)>, encoders: Vec<FqMatrix>, selection: Vec<usize> },
}

/// An index code over an extension of the instance field.
#[derive(Clone, Debug)]
pub struct Scheme {
    kind: SchemeKind,
    fractional: bool,
    base_q: u32,
    inst: IccsiInstance,
    sub_packets: usize,
    body: Body,
}

/// How one receiver decoded one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeTrace {
    pub receiver: usize,
    /// Transmissions addressed to groups containing the receiver.
    pub heard: usize,
    /// Coded terms cancelled with side information.
    pub stripped: usize,
    /// Coded terms solved for through an MDS submatrix.
    pub solved: usize,
    /// Evaluations of `R_j X` gathered before the final inversion.
    pub gathered: usize,
    pub recovered: Option<Vec<u32>>,
    pub expected: Vec<u32>,
    pub success: bool,
}

/// One encode/decode round.
#[derive(Clone, Debug)]
pub struct Trial {
    pub x: FqMatrix,
    pub transmitted: Vec<u32>,
    pub decodes: Vec<DecodeTrace>,
}

impl Trial {
    pub fn failures(&self) -> Vec<usize> {
        self.decodes.iter().filter(|d| !d.success).map(|d| d.receiver).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub scheme: SchemeSummary,
    pub trials: usize,
    pub seed: u64,
    /// Receiver decodes that failed, over all trials.
    pub failures: usize,
    /// Receivers (0-based) that failed in at least one trial.
    pub failed_receivers: Vec<usize>,
    pub first: Option<Trial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeSummary {
    pub name: &'static str,
    pub fractional: bool,
    pub base_field: u32,
    pub field: u32,
    pub extension_degree: u32,
    pub sub_packets: usize,
    pub transmissions: usize,
    pub rate: Rational,
    /// `(length, dimension)` of every MDS code used, outer code last.
    pub codes: Vec<(usize, usize)>,
    /// `(group, rows)` per group copy.
    pub groups: Vec<(u64, usize)>,
}

fn to_usize(r: &Rational, what: &str) -> Result<usize, SchemeError> {
    if !r.is_integer() {
        return Err(SchemeError::Certificate(format!("{what} = {r} is not an integer")));
    }
    r.to_integer().to_usize().ok_or_else(|| SchemeError::Certificate(format!("{what} = {r} is out of range")))
}

/// Least common multiple of the denominators.
fn common_denominator<'r>(values: impl IntoIterator<Item = &'r Rational>) -> Result<usize, SchemeError> {
    let l = values.into_iter().fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    l.to_usize().filter(|&l| l <= 1 << 12).ok_or_else(|| SchemeError::Certificate(format!("sub-packetization {l} too large")))
}

fn too_small(e: MdsError) -> SchemeError {
    SchemeError::FieldTooSmall(0, e.to_string())
}

/// Smallest extension of `base` for which `attempt` succeeds. Only
/// field-size failures move on to the next degree.
fn search_extension<T>(
    base: &FieldSpec,
    mut attempt: impl FnMut(&FieldSpec) -> Result<T, SchemeError>,
) -> Result<(FieldSpec, T), SchemeError> {
    let mut last = String::new();
    let mut largest = base.q();
    for degree in 1.. {
        let big = if degree == 1 {
            base.clone()
        } else {
            match base.extension(degree) {
                Ok(f) => f,
                Err(_) => break,
            }
        };
        largest = big.q();
        match attempt(&big) {
            Ok(t) => return Ok((big, t)),
            Err(SchemeError::FieldTooSmall(_, why)) => last = why,
            Err(e) => return Err(e),
        }
    }
    Err(SchemeError::FieldTooSmall(largest, last))
}

fn embed_vector(map: &[u32], v: &[u32]) -> Vec<u32> {
    v.iter().map(|&x| map[x as usize]).collect()
}

/// Group layout before field choice: clique copies as `(members, vector)`
/// and the number of rows each group copy transmits.
struct Layout {
    groups: Vec<(u64, Vec<(u64, Vec<u32>)>, usize)>,
}

impl Layout {
    fn codes(&self, r: usize) -> Vec<(usize, usize)> {
        let mut codes: Vec<(usize, usize)> = self.groups.iter().map(|(_, c, rows)| (c.len(), *rows)).collect();
        codes.push((self.groups.iter().map(|(_, c, _)| c.len()).sum(), r));
        codes
    }
}

fn expand_cliques(cliques: &[CoverEntry], scale: usize) -> Result<Vec<(u64, Vec<u32>)>, SchemeError> {
    let mut out = Vec::new();
    for c in cliques {
        let times = to_usize(&(&c.weight * Rational::from_integer(scale.into())), "clique multiplicity")?;
        for _ in 0..times {
            out.push((c.members, c.vector.clone()));
        }
    }
    Ok(out)
}

fn check_weights(cliques: &[CoverEntry], fractional: bool) -> Result<(), SchemeError> {
    if !fractional && cliques.iter().any(|c| !c.weight.is_one()) {
        return Err(SchemeError::Certificate("integral scheme given fractional weights".into()));
    }
    Ok(())
}

impl Scheme {
    /// Transmits `L X` for an encoder `L` whose rows lie in the sender space.
    pub fn linear(inst: &IccsiInstance, encoder: &FqMatrix) -> Result<Scheme, SchemeError> {
        let validity = inst.validate_code(encoder)?;
        if !validity.is_valid() {
            return Err(SchemeError::NotDecodable(validity.failures()));
        }
        Ok(Scheme {
            kind: SchemeKind::Linear,
            fractional: false,
            base_q: inst.field().q(),
            inst: inst.clone(),
            sub_packets: 1,
            body: Body::Linear { validity },
        })
    }

    /// Clique cover: each weighted clique sends `v_C X H^(c)` once per copy.
    pub fn clique_cover(inst: &IccsiInstance, cliques: &[CoverEntry], fractional: bool) -> Result<Scheme, SchemeError> {
        check_weights(cliques, fractional)?;
        let r = common_denominator(cliques.iter().map(|c| &c.weight))?;
        let copies = expand_cliques(cliques, r)?;
        let rows = copies.len();
        let layout = Layout { groups: vec![(full_mask(inst.m()), copies, rows)] };
        Scheme::from_layout(SchemeKind::CliqueCover, fractional, inst, layout, r)
    }

    /// Local clique cover: the cliques' coded symbols pass through an
    /// `[s, k r]` MDS code.
    pub fn local_clique(
        inst: &IccsiInstance,
        k: &Rational,
        cliques: &[CoverEntry],
        fractional: bool,
    ) -> Result<Scheme, SchemeError> {
        check_weights(cliques, fractional)?;
        let r = common_denominator(cliques.iter().map(|c| &c.weight).chain([k]))?;
        let copies = expand_cliques(cliques, r)?;
        let rows = to_usize(&(k * Rational::from_integer(r.into())), "k r")?;
        let layout = Layout { groups: vec![(full_mask(inst.m()), copies, rows)] };
        Scheme::from_layout(SchemeKind::LocalClique, fractional, inst, layout, r)
    }

    /// Partitioned local clique cover: every group copy runs its own local
    /// cover, and all clique copies share one outer MDS code.
    pub fn partitioned_local(inst: &IccsiInstance, groups: &[GroupEntry], fractional: bool) -> Result<Scheme, SchemeError> {
        if !fractional && groups.iter().any(|g| !g.weight.is_one()) {
            return Err(SchemeError::Certificate("integral scheme given fractional group weights".into()));
        }
        let r1 = common_denominator(groups.iter().flat_map(|g| g.cliques.iter().map(|c| &c.weight).chain([&g.cost])))?;
        let r2 = common_denominator(groups.iter().map(|g| &g.weight))?;
        let mut layout = Layout { groups: Vec::new() };
        for g in groups {
            let times = to_usize(&(&g.weight * Rational::from_integer(r2.into())), "group multiplicity")?;
            let rows = to_usize(&(&g.cost * Rational::from_integer(r1.into())), "t_M r")?;
            let copies = expand_cliques(&g.cliques, r1)?;
            for _ in 0..times {
                layout.groups.push((g.members, copies.clone(), rows));
            }
        }
        Scheme::from_layout(SchemeKind::PartitionedLocal, fractional, inst, layout, r1 * r2)
    }

    fn from_layout(
        kind: SchemeKind,
        fractional: bool,
        inst: &IccsiInstance,
        layout: Layout,
        r: usize,
    ) -> Result<Scheme, SchemeError> {
        for (members, cliques, rows) in &layout.groups {
            if *rows > cliques.len() {
                return Err(SchemeError::Certificate(format!(
                    "group {members:#b} sends {rows} rows from {} clique copies",
                    cliques.len()
                )));
            }
        }
        let codes = layout.codes(r);
        let (big, (gs, h)) = search_extension(inst.field(), |f| {
            let gs = layout
                .groups
                .iter()
                .map(|(_, c, rows)| rs_generator(c.len(), *rows, f))
                .collect::<Result<Vec<_>, _>>()
                .map_err(too_small)?;
            let (s, _) = codes[codes.len() - 1];
            let h = rs_generator(s, r, f).map_err(too_small)?;
            Ok((gs, h))
        })?;
        let map = inst.field().embedding_into(&big).map_err(|e| SchemeError::Certificate(e.to_string()))?;
        let mut column = 0;
        let copies = layout
            .groups
            .into_iter()
            .zip(gs)
            .map(|((members, cliques, _), g)| GroupCopy {
                members,
                cliques: cliques
                    .into_iter()
                    .map(|(m, v)| {
                        column += 1;
                        CliqueCopy { members: m, vector: embed_vector(&map, &v), column: column - 1 }
                    })
                    .collect(),
                g,
            })
            .collect();
        Ok(Scheme {
            kind,
            fractional,
            base_q: inst.field().q(),
            inst: inst.extend_to(&big)?,
            sub_packets: r,
            body: Body::Cliques { copies, h },
        })
    }

    /// Partition multicast: group copy `k` sends `L_M X G^(k)` where `L_M`
    /// is a multicast encoder for the receivers in `M` and `G` is an
    /// `[s, r]` MDS generator.
    pub fn partition_multicast(inst: &IccsiInstance, groups: &[GroupEntry], fractional: bool) -> Result<Scheme, SchemeError> {
        let (copies, r) = multicast_copies(groups, fractional)?;
        let (big, (encoders, g)) = search_extension(inst.field(), |f| {
            let encoders = multicast_encoders(inst, groups, f)?;
            let g = rs_generator(copies.len(), r, f).map_err(too_small)?;
            Ok((encoders, g))
        })?;
        Ok(Scheme {
            kind: SchemeKind::PartitionMulticast,
            fractional,
            base_q: inst.field().q(),
            inst: inst.extend_to(&big)?,
            sub_packets: r,
            body: Body::Multicast { copies, encoders, g },
        })
    }

    /// Multicast without mixing sub-packets: copy `k` sends
    /// `L_M X^(σ_k)` for the sub-packet `σ_k` (0-based).
    pub fn unmixed_multicast(inst: &IccsiInstance, groups: &[GroupEntry], selection: &[usize]) -> Result<Scheme, SchemeError> {
        let (copies, r) = multicast_copies(groups, true)?;
        if selection.len() != copies.len() || selection.iter().any(|&s| s >= r) {
            return Err(SchemeError::Certificate(format!(
                "selection needs {} entries below {r}",
                copies.len()
            )));
        }
        let (big, encoders) = search_extension(inst.field(), |f| multicast_encoders(inst, groups, f))?;
        Ok(Scheme {
            kind: SchemeKind::UnmixedMulticast,
            fractional: true,
            base_q: inst.field().q(),
            inst: inst.extend_to(&big)?,
            sub_packets: r,
            body: Body::Unmixed { copies, encoders, selection: selection.to_vec() },
        })
    }

    /// The scheme matching a bound's certificate.
    pub fn from_bound(inst: &IccsiInstance, bound: &Bound, multicast: bool) -> Result<Scheme, SchemeError> {
        let fractional = !bound.value.is_integer() || match &bound.certificate {
            Certificate::Cover { cliques } | Certificate::Local { cliques, .. } => cliques.iter().any(|c| !c.weight.is_one()),
            Certificate::Groups { groups } => groups.iter().any(|g| !g.weight.is_one() || g.cliques.iter().any(|c| !c.weight.is_one())),
        };
        match &bound.certificate {
            Certificate::Cover { cliques } => Scheme::clique_cover(inst, cliques, fractional),
            Certificate::Local { k, cliques } => Scheme::local_clique(inst, k, cliques, fractional),
            Certificate::Groups { groups } if multicast => Scheme::partition_multicast(inst, groups, fractional),
            Certificate::Groups { groups } => Scheme::partitioned_local(inst, groups, fractional),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// The instance over the field the scheme runs in.
    pub fn instance(&self) -> &IccsiInstance {
        &self.inst
    }

    pub fn field(&self) -> &FieldSpec {
        self.inst.field()
    }

    pub fn sub_packets(&self) -> usize {
        self.sub_packets
    }

    pub fn transmissions(&self) -> usize {
        match &self.body {
            Body::Linear { validity } => validity.encoder.rows(),
            Body::Cliques { copies, .. } => copies.iter().map(|c| c.g.rows()).sum(),
            Body::Multicast { copies, encoders, .. } | Body::Unmixed { copies, encoders, .. } => {
                copies.iter().map(|&(_, e)| encoders[e].rows()).sum()
            }
        }
    }

    /// Transmissions per sub-packet.
    pub fn rate(&self) -> Rational {
        Rational::new((self.transmissions() as i64).into(), (self.sub_packets as i64).into())
    }

    pub fn summary(&self) -> SchemeSummary {
        let (codes, groups) = match &self.body {
            Body::Linear { validity } => (Vec::new(), vec![(full_mask(self.inst.m()), validity.encoder.rows())]),
            Body::Cliques { copies, h } => {
                let mut codes: Vec<(usize, usize)> = copies.iter().map(|c| (c.g.cols(), c.g.rows())).collect();
                codes.push((h.cols(), h.rows()));
                (codes, copies.iter().map(|c| (c.members, c.g.rows())).collect())
            }
            Body::Multicast { copies, encoders, g } => {
                (vec![(g.cols(), g.rows())], copies.iter().map(|&(m, e)| (m, encoders[e].rows())).collect())
            }
            Body::Unmixed { copies, encoders, .. } => {
                (Vec::new(), copies.iter().map(|&(m, e)| (m, encoders[e].rows())).collect())
            }
        };
        SchemeSummary {
            name: self.kind.name(),
            fractional: self.fractional,
            base_field: self.base_q,
            field: self.field().q(),
            extension_degree: self.field().ell() / crate::field::prime_power(self.base_q).map_or(1, |(_, e)| e),
            sub_packets: self.sub_packets,
            transmissions: self.transmissions(),
            rate: self.rate(),
            codes,
            groups,
        }
    }

    /// The transmitted symbols for a message matrix `X` (`n × r`).
    pub fn encode(&self, x: &FqMatrix) -> Vec<u32> {
        let f = self.field();
        match &self.body {
            Body::Linear { validity } => validity.encoder.mul(x).expect("dimensions agree").entries().to_vec(),
            Body::Cliques { copies, h } => {
                let mut out = Vec::new();
                for copy in copies {
                    let w: Vec<u32> = copy.cliques.iter().map(|c| dot(f, &c.vector, &x.mul_vec(&h.col(c.column)))).collect();
                    out.extend(copy.g.mul_vec(&w));
                }
                out
            }
            Body::Multicast { copies, encoders, g } => {
                let mut out = Vec::new();
                for (k, &(_, e)) in copies.iter().enumerate() {
                    out.extend(encoders[e].mul_vec(&x.mul_vec(&g.col(k))));
                }
                out
            }
            Body::Unmixed { copies, encoders, selection } => {
                let mut out = Vec::new();
                for (k, &(_, e)) in copies.iter().enumerate() {
                    out.extend(encoders[e].mul_vec(&x.col(selection[k])));
                }
                out
            }
        }
    }

    /// Receiver `j` decodes from the transmission `y` and its side
    /// information `V^(j) X`.
    pub fn decode(&self, j: usize, y: &[u32], side: &FqMatrix) -> DecodeTrace {
        let mut trace = DecodeTrace {
            receiver: j,
            heard: 0,
            stripped: 0,
            solved: 0,
            gathered: 0,
            recovered: None,
            expected: Vec::new(),
            success: false,
        };
        trace.recovered = match &self.body {
            Body::Linear { validity } => {
                let ym = FqMatrix::from_entries(self.field(), validity.encoder.rows(), self.sub_packets, y.to_vec())
                    .expect("transmission length");
                trace.heard = y.len();
                validity.decode(j, &ym, side).ok()
            }
            Body::Cliques { copies, h } => self.decode_cliques(j, y, side, copies, h, &mut trace),
            Body::Multicast { copies, encoders, g } => self.decode_multicast(j, y, side, copies, encoders, g, &mut trace),
            Body::Unmixed { copies, encoders, selection } => {
                self.decode_unmixed(j, y, side, copies, encoders, selection, &mut trace)
            }
        };
        trace
    }

    /// `a·V^(j) X`, the side-information combination as a row of length `r`.
    fn side_combination(&self, side: &FqMatrix, a: &[u32]) -> Vec<u32> {
        side.left_mul_vec(a)
    }

    fn decode_cliques(
        &self,
        j: usize,
        y: &[u32],
        side: &FqMatrix,
        copies: &[GroupCopy],
        h: &FqMatrix,
        trace: &mut DecodeTrace,
    ) -> Option<Vec<u32>> {
        let f = self.field();
        let vj = self.inst.v(j);
        let rj = self.inst.request(j);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        let mut offset = 0;
        for copy in copies {
            let rows = copy.g.rows();
            let block = &y[offset..offset + rows];
            offset += rows;
            if copy.members >> j & 1 == 0 {
                continue;
            }
            trace.heard += rows;
            let mut residual = block.to_vec();
            let mut unknown = Vec::new();
            for (i, c) in copy.cliques.iter().enumerate() {
                match express_in_rows(vj, &c.vector).ok()? {
                    Some(a) => {
                        let w = dot(f, &self.side_combination(side, &a), &h.col(c.column));
                        for (t, res) in residual.iter_mut().enumerate() {
                            *res = f.sub(*res, f.mul(copy.g.get(t, i), w));
                        }
                        trace.stripped += 1;
                    }
                    None => unknown.push(i),
                }
            }
            let sol = solve(&copy.g.select_cols(&unknown), &residual).ok()?;
            if !sol.kernel.is_empty() {
                return None;
            }
            trace.solved += unknown.len();
            for (pos, &i) in unknown.iter().enumerate() {
                let c = &copy.cliques[i];
                if c.members >> j & 1 == 0 {
                    continue;
                }
                let mut stacked = FqMatrix::from_rows(f, self.inst.n(), &[c.vector.clone()]);
                stacked = stacked.vstack(vj).ok()?;
                let coeffs = express_in_rows(&stacked, rj).ok()??;
                let col = h.col(c.column);
                let side_part = dot(f, &self.side_combination(side, &coeffs[1..]), &col);
                values.push(f.add(f.mul(coeffs[0], sol.particular[pos]), side_part));
                cols.push(c.column);
            }
        }
        trace.gathered = values.len();
        if values.len() != self.sub_packets {
            return None;
        }
        let inv = h.select_cols(&cols).inverse()?;
        Some(inv.left_mul_vec(&values))
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_multicast(
        &self,
        j: usize,
        y: &[u32],
        side: &FqMatrix,
        copies: &[(u64, usize)],
        encoders: &[FqMatrix],
        g: &FqMatrix,
        trace: &mut DecodeTrace,
    ) -> Option<Vec<u32>> {
        let f = self.field();
        let mut cols = Vec::new();
        let mut values = Vec::new();
        let mut offset = 0;
        for (k, &(members, e)) in copies.iter().enumerate() {
            let l = &encoders[e];
            let block = &y[offset..offset + l.rows()];
            offset += l.rows();
            if members >> j & 1 == 0 {
                continue;
            }
            trace.heard += l.rows();
            let coeffs = express_in_rows(&l.vstack(self.inst.v(j)).ok()?, self.inst.request(j)).ok()??;
            let (c, a) = coeffs.split_at(l.rows());
            let side_part = dot(f, &self.side_combination(side, a), &g.col(k));
            values.push(f.add(dot(f, c, block), side_part));
            cols.push(k);
            trace.stripped += 1;
        }
        trace.gathered = values.len();
        if values.len() != self.sub_packets {
            return None;
        }
        let inv = g.select_cols(&cols).inverse()?;
        Some(inv.left_mul_vec(&values))
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_unmixed(
        &self,
        j: usize,
        y: &[u32],
        side: &FqMatrix,
        copies: &[(u64, usize)],
        encoders: &[FqMatrix],
        selection: &[usize],
        trace: &mut DecodeTrace,
    ) -> Option<Vec<u32>> {
        let f = self.field();
        let mut out: Vec<Option<u32>> = vec![None; self.sub_packets];
        let mut offset = 0;
        for (k, &(members, e)) in copies.iter().enumerate() {
            let l = &encoders[e];
            let block = &y[offset..offset + l.rows()];
            offset += l.rows();
            if members >> j & 1 == 0 {
                continue;
            }
            trace.heard += l.rows();
            let coeffs = express_in_rows(&l.vstack(self.inst.v(j)).ok()?, self.inst.request(j)).ok()??;
            let (c, a) = coeffs.split_at(l.rows());
            let side_part = self.side_combination(side, a)[selection[k]];
            if out[selection[k]].is_none() {
                trace.gathered += 1;
            }
            out[selection[k]] = Some(f.add(dot(f, c, block), side_part));
        }
        out.into_iter().collect()
    }

    /// Encodes `X` and runs every receiver's decoder.
    pub fn run(&self, x: &FqMatrix) -> Trial {
        let transmitted = self.encode(x);
        let decodes = (0..self.inst.m())
            .map(|j| {
                let side = self.inst.v(j).mul(x).expect("dimensions agree");
                let mut trace = self.decode(j, &transmitted, &side);
                trace.expected = x.left_mul_vec(self.inst.request(j));
                trace.success = trace.recovered.as_ref() == Some(&trace.expected);
                trace
            })
            .collect();
        Trial { x: x.clone(), transmitted, decodes }
    }

    /// Uniformly random message matrix.
    pub fn random_message(&self, rng: &mut impl Rng) -> FqMatrix {
        let q = self.field().q();
        let (n, r) = (self.inst.n(), self.sub_packets);
        let entries = (0..n * r).map(|_| rng.gen_range(0..q)).collect();
        FqMatrix::from_entries(self.field(), n, r, entries).expect("shape")
    }

    /// Runs `trials` random messages from a ChaCha stream seeded by `seed`.
    pub fn simulate(&self, trials: usize, seed: u64) -> Simulation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        let mut failed = 0u64;
        let mut first = None;
        for t in 0..trials {
            let x = self.random_message(&mut rng);
            let trial = self.run(&x);
            for j in trial.failures() {
                failures += 1;
                failed |= 1 << j;
            }
            if t == 0 {
                first = Some(trial);
            }
        }
        Simulation {
            scheme: self.summary(),
            trials,
            seed,
            failures,
            failed_receivers: bits(failed).collect(),
            first,
        }
    }
}

/// Group copies `(members, encoder index)` and the sub-packetization.
fn multicast_copies(groups: &[GroupEntry], fractional: bool) -> Result<(Vec<(u64, usize)>, usize), SchemeError> {
    if !fractional && groups.iter().any(|g| !g.weight.is_one()) {
        return Err(SchemeError::Certificate("integral scheme given fractional group weights".into()));
    }
    let r = common_denominator(groups.iter().map(|g| &g.weight))?;
    let mut copies = Vec::new();
    for (e, g) in groups.iter().enumerate() {
        let times = to_usize(&(&g.weight * Rational::from_integer(r.into())), "group multiplicity")?;
        copies.extend(std::iter::repeat((g.members, e)).take(times));
    }
    Ok((copies, r))
}

/// The sub-instance seen by group `M`: its members' side information, with
/// sender space and requests both `R_M`.
pub fn group_instance(inst: &IccsiInstance, members: u64) -> Result<IccsiInstance, InstanceError> {
    let f = inst.field();
    let idx: Vec<usize> = bits(members).collect();
    let r = inst.r().select_rows(&idx);
    let v = idx.iter().map(|&j| inst.v(j).clone()).collect();
    IccsiInstance::new(f.clone(), inst.t(), r.clone(), v, r)
}

/// Multicast encoders `L_M`, one per group, over `big`.
fn multicast_encoders(inst: &IccsiInstance, groups: &[GroupEntry], big: &FieldSpec) -> Result<Vec<FqMatrix>, SchemeError> {
    let ext = inst.extend_to(big)?;
    groups
        .iter()
        .map(|g| {
            let sub = group_instance(&ext, g.members)?;
            multicast_matrix(&sub).map_err(|e| match e {
                MinRankError::FieldTooSmall { .. } => SchemeError::FieldTooSmall(big.q(), e.to_string()),
                other => SchemeError::Certificate(other.to_string()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clique::{Bounds, Param};
    use crate::instance::IcsiInstance;
    use crate::lp::{int, ratio};

    fn iccsi(q: u32, n: usize, v: &[&[Vec<u32>]], r: &[Vec<u32>]) -> IccsiInstance {
        let f = FieldSpec::of_order(q).unwrap();
        let vs = FqMatrix::identity(&f, n);
        let v = v.iter().map(|rows| FqMatrix::from_rows(&f, n, rows)).collect();
        IccsiInstance::new(f.clone(), 1, vs, v, FqMatrix::from_rows(&f, n, r)).unwrap()
    }

    fn four_receivers() -> IccsiInstance {
        IcsiInstance::canonical_one_based(&[&[2], &[3, 4], &[1, 4], &[1, 3]])
            .unwrap()
            .embed(&FieldSpec::prime(2).unwrap())
    }

    fn clean(s: &Scheme, trials: usize) {
        let sim = s.simulate(trials, 7);
        assert_eq!(sim.failures, 0, "{:?}", sim.first.map(|t| t.decodes));
    }

    #[test]
    fn two_receiver_clique_sends_once() {
        let inst = iccsi(2, 2, &[&[vec![1, 1]], &[]], &[vec![1, 0], vec![0, 1]]);
        let phi = Bounds::new(&inst).compute(Param::Phi).unwrap();
        let s = Scheme::from_bound(&inst, &phi, false).unwrap();
        assert_eq!(s.transmissions(), 1);
        assert_eq!(s.field().q(), 2);
        clean(&s, 20);
    }

    #[test]
    fn fractional_multicast_and_unmixed_failure() {
        let inst = four_receivers();
        let half = ratio(1, 2);
        let group = |members: u64, d: i64| GroupEntry { members, weight: half.clone(), cost: int(d), cliques: vec![] };
        let groups = vec![group(0b0111, 2), group(0b1011, 2), group(0b1100, 1)];
        let s = Scheme::partition_multicast(&inst, &groups, true).unwrap();
        assert_eq!(s.transmissions(), 5);
        assert_eq!(s.rate(), ratio(5, 2));
        assert_eq!(s.field().q(), 2);
        clean(&s, 50);
        for sel in 0..8usize {
            let selection: Vec<usize> = (0..3).map(|b| sel >> b & 1).collect();
            let u = Scheme::unmixed_multicast(&inst, &groups, &selection).unwrap();
            assert_eq!(u.transmissions(), 5);
            let sim = u.simulate(3, 1);
            assert!(sim.failures > 0, "selection {selection:?}");
        }
    }

    #[test]
    fn five_cycle_fractional_cover() {
        let inst = IcsiInstance::canonical_one_based(&[&[2, 5], &[1, 3], &[2, 4], &[3, 5], &[4, 1]])
            .unwrap()
            .embed(&FieldSpec::prime(2).unwrap());
        let b = Bounds::new(&inst).compute(Param::PhiF).unwrap();
        let s = Scheme::from_bound(&inst, &b, false).unwrap();
        assert_eq!(s.sub_packets(), 2);
        assert_eq!(s.transmissions(), 5);
        clean(&s, 30);
    }

    #[test]
    fn local_cover_over_gf4() {
        let e = |s: &str| s.chars().map(|c| c.to_digit(10).unwrap()).collect::<Vec<u32>>();
        let rows = [
            ["010000", "000011"],
            ["100000", "001100"],
            ["000100", "000011"],
            ["001000", "110000"],
            ["000001", "001100"],
            ["110000", "000010"],
        ];
        let v: Vec<Vec<Vec<u32>>> = rows.iter().map(|rs| rs.iter().map(|r| e(r)).collect()).collect();
        let v: Vec<&[Vec<u32>]> = v.iter().map(|x| x.as_slice()).collect();
        let r: Vec<Vec<u32>> = (0..6).map(|i| crate::matrix::unit(6, i)).collect();
        let inst = iccsi(4, 6, &v, &r);
        let cliques = vec![
            CoverEntry { members: 0b000011, weight: int(1), vector: e("110000") },
            CoverEntry { members: 0b001100, weight: int(1), vector: e("001100") },
            CoverEntry { members: 0b110000, weight: int(1), vector: e("000011") },
        ];
        let s = Scheme::local_clique(&inst, &int(2), &cliques, false).unwrap();
        assert_eq!(s.transmissions(), 2);
        clean(&s, 30);
        // k = 1 leaves the receivers that miss two vectors unable to decode
        let s = Scheme::local_clique(&inst, &int(1), &cliques, false).unwrap();
        assert!(s.simulate(5, 3).failures > 0);
    }

    #[test]
    fn partitioned_local_three_singletons() {
        let inst = iccsi(
            2,
            3,
            &[&[vec![0, 1, 1]], &[vec![1, 1, 1]], &[vec![1, 1, 1]]],
            &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        );
        let b = Bounds::new(&inst).compute(Param::PhiPL).unwrap();
        let s = Scheme::from_bound(&inst, &b, false).unwrap();
        assert_eq!(s.transmissions(), 3);
        clean(&s, 20);
        let m = Bounds::new(&inst).compute(Param::PhiP).unwrap();
        let s = Scheme::from_bound(&inst, &m, true).unwrap();
        assert_eq!(s.transmissions(), 2);
        clean(&s, 20);
    }

    #[test]
    fn linear_kappa_code() {
        let inst = four_receivers();
        let k = crate::minrank::kappa(&inst, crate::minrank::DEFAULT_BUDGET).unwrap();
        let s = Scheme::linear(&inst, &k.encoder).unwrap();
        assert_eq!(s.transmissions(), k.value);
        clean(&s, 20);
    }

    #[test]
    fn every_parameter_yields_a_working_scheme() {
        let inst = four_receivers();
        let mut b = Bounds::new(&inst);
        for p in Param::ALL {
            let bound = b.compute(p).unwrap();
            let multicast = matches!(p, Param::PhiP | Param::PhiPF);
            let s = Scheme::from_bound(&inst, &bound, multicast).unwrap();
            assert_eq!(s.rate(), bound.value, "{p}");
            clean(&s, 10);
        }
    }
}
