//! Recognising transformation groupoids.
//!
//! A finite groupoid is a transformation groupoid exactly when it admits a
//! partition into bisections that contains the unit space, is closed under
//! inversion and absorbs products (`UV ⊆ W` for some block `W`). From such a
//! partition we build the label group `H` generated by the blocks, the cocycle
//! `c(γ) = [U_γ]`, the partial action of `H` on the units, and the
//! isomorphism `Φ(γ) = (c(γ), s(γ))` onto its transformation groupoid.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{transformation_groupoid, validate_hom, FiniteGroupoid, GroupoidHom};
use crate::groups::{GroupDescriptor, GroupElement, LabelPresentation};
use crate::pds::{FinitePds, FiniteSpace, PartialBijection};

/// Named blocks of arrows with a distinguished unit block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisectionPartition {
    pub names: Vec<String>,
    pub blocks: Vec<Vec<usize>>,
    pub unit_block: usize,
}

impl BisectionPartition {
    fn block_of(&self, n_arrows: usize) -> Result<Vec<usize>> {
        let mut owner = vec![usize::MAX; n_arrows];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                if i >= n_arrows {
                    return Err(Error::Partition(format!("block `{}` names an unknown arrow", self.names[b])));
                }
                if owner[i] != usize::MAX {
                    return Err(Error::Partition(format!(
                        "arrow #{i} lies in `{}` and `{}`",
                        self.names[owner[i]], self.names[b]
                    )));
                }
                owner[i] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Partition(format!("arrow #{i} is in no block")));
        }
        if self.unit_block >= self.blocks.len() || self.names.len() != self.blocks.len() {
            return Err(Error::Partition("unit block out of range".into()));
        }
        Ok(owner)
    }
}

/// A failed condition of a bisection partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    /// The unit block is not the unit space.
    UnitBlock,
    /// `s` or `r` is not injective on the block.
    NotBisection { block: usize },
    /// `U^-1` is not a block.
    NotInverseClosed { block: usize },
    /// `UV` is not contained in a single block.
    ProductNotAbsorbed { left: usize, right: usize },
}

impl PartitionViolation {
    pub fn describe(&self, p: &BisectionPartition) -> String {
        match self {
            PartitionViolation::UnitBlock => format!("unit block `{}` differs from the unit space", p.names[p.unit_block]),
            PartitionViolation::NotBisection { block } => format!("`{}` is not a bisection", p.names[*block]),
            PartitionViolation::NotInverseClosed { block } => format!("`{}`^-1 is not a block", p.names[*block]),
            PartitionViolation::ProductNotAbsorbed { left, right } => format!(
                "UV ⊆ W fails for U = `{}`, V = `{}`",
                p.names[*left], p.names[*right]
            ),
        }
    }
}

fn require_complete(gpd: &FiniteGroupoid) -> Result<()> {
    if gpd.is_truncated() {
        return Err(Error::Truncated("recognition needs the full composition table".into()));
    }
    Ok(())
}

/// Checks the unit block, bisections, inverse closure and product absorption.
pub fn validate_partition(gpd: &FiniteGroupoid, p: &BisectionPartition) -> Result<Vec<PartitionViolation>> {
    require_complete(gpd)?;
    let owner = p.block_of(gpd.arrow_count())?;
    let mut out = Vec::new();
    let units: BTreeSet<usize> = (0..gpd.unit_count()).map(|u| gpd.unit_arrow(u)).collect();
    let unit_block: BTreeSet<usize> = p.blocks[p.unit_block].iter().copied().collect();
    if units != unit_block {
        out.push(PartitionViolation::UnitBlock);
    }
    let sets: Vec<BTreeSet<usize>> = p.blocks.iter().map(|b| b.iter().copied().collect()).collect();
    for (b, block) in p.blocks.iter().enumerate() {
        let sources: BTreeSet<usize> = block.iter().map(|&i| gpd.source(i)).collect();
        let ranges: BTreeSet<usize> = block.iter().map(|&i| gpd.range(i)).collect();
        if sources.len() != block.len() || ranges.len() != block.len() {
            out.push(PartitionViolation::NotBisection { block: b });
        }
        let inv: BTreeSet<usize> = block.iter().map(|&i| gpd.inverse(i)).collect();
        if !sets.contains(&inv) {
            out.push(PartitionViolation::NotInverseClosed { block: b });
        }
    }
    let mut products: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for (&(g, h), &k) in gpd.composition_table() {
        products.entry((owner[g], owner[h])).or_default().insert(owner[k]);
    }
    for ((u, v), targets) in products {
        if targets.len() > 1 {
            out.push(PartitionViolation::ProductNotAbsorbed { left: u, right: v });
        }
    }
    Ok(out)
}

/// The unit block together with one singleton block per non-unit arrow.
pub fn singleton_partition(gpd: &FiniteGroupoid) -> BisectionPartition {
    let units: Vec<usize> = (0..gpd.unit_count()).map(|u| gpd.unit_arrow(u)).collect();
    let mut names = vec!["X".to_string()];
    let mut blocks = vec![units];
    for i in 0..gpd.arrow_count() {
        if !gpd.is_unit_arrow(i) {
            names.push(format!("U{}", blocks.len()));
            blocks.push(vec![i]);
        }
    }
    BisectionPartition { names, blocks, unit_block: 0 }
}

/// Blocks `{g} × U_{g^-1}` of a transformation groupoid, one per group element
/// with nonempty domain.
pub fn canonical_partition(gpd: &FiniteGroupoid) -> Result<BisectionPartition> {
    let mut by_element: BTreeMap<GroupElement, Vec<usize>> = BTreeMap::new();
    for (i, a) in gpd.arrows().iter().enumerate() {
        let (g, _) = a
            .payload
            .as_ref()
            .ok_or_else(|| Error::Partition("canonical partition needs (g, x) payloads".into()))?;
        by_element.entry(g.clone()).or_default().push(i);
    }
    let units: BTreeSet<usize> = (0..gpd.unit_count()).map(|u| gpd.unit_arrow(u)).collect();
    let mut names = Vec::new();
    let mut blocks = Vec::new();
    let mut unit_block = None;
    for (_, block) in by_element {
        if unit_block.is_none() && block.iter().copied().collect::<BTreeSet<_>>() == units {
            unit_block = Some(blocks.len());
            names.push("X".to_string());
        } else {
            names.push(format!("U{}", blocks.len()));
        }
        blocks.push(block);
    }
    if gpd.unit_count() == 0 {
        names.push("X".to_string());
        blocks.push(Vec::new());
        unit_block = Some(blocks.len() - 1);
    }
    let unit_block = unit_block.ok_or_else(|| Error::Partition("no element acts as the identity".into()))?;
    Ok(BisectionPartition { names, blocks, unit_block })
}

/// The cocycle `c(γ) = [U_γ]` into the label group.
#[derive(Clone, Debug)]
pub struct LabelCocycle {
    pub presentation: Arc<LabelPresentation>,
    pub group: GroupDescriptor,
    /// Block of each arrow.
    pub block_of: Vec<usize>,
    /// `c(γ)` for each arrow, in normal form.
    pub values: Vec<GroupElement>,
    pub report: CocycleReport,
}

/// Checks run while building the label cocycle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CocycleReport {
    /// Composable pairs where `c(γη)` differs from the normal form of `c(γ)c(η)`.
    pub product_failures: Vec<(usize, usize)>,
    /// Arrows where `c(γ^-1) != c(γ)^-1`.
    pub inverse_failures: Vec<usize>,
    /// Words of length at most three with more than one normal form.
    pub critical_pairs: Vec<(Vec<u32>, Vec<Vec<u32>>)>,
    /// Distinct blocks whose labels have equal normal forms.
    pub label_collisions: Vec<(usize, usize)>,
    /// Whether `c^-1(e)` is exactly the unit space.
    pub kernel_is_unit_space: bool,
}

impl CocycleReport {
    pub fn is_clean(&self) -> bool {
        self.product_failures.is_empty()
            && self.inverse_failures.is_empty()
            && self.critical_pairs.is_empty()
            && self.label_collisions.is_empty()
            && self.kernel_is_unit_space
    }

    pub fn confluent(&self) -> bool {
        self.critical_pairs.is_empty()
    }
}

/// All irreducible words reachable from `word` by any sequence of rewrites.
fn all_normal_forms(p: &LabelPresentation, word: Vec<u32>) -> BTreeSet<Vec<u32>> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![word];
    let mut out = BTreeSet::new();
    while let Some(w) = stack.pop() {
        if !seen.insert(w.clone()) {
            continue;
        }
        let mut successors = Vec::new();
        for i in 0..w.len() {
            if w[i] == p.identity_label() {
                let mut v = w.clone();
                v.remove(i);
                successors.push(v);
            }
            if i + 1 < w.len() {
                if p.inverse_label(w[i]) == w[i + 1] {
                    let mut v = w.clone();
                    v.drain(i..i + 2);
                    successors.push(v);
                }
                if let Some(c) = p.product_rule(w[i], w[i + 1]) {
                    let mut v = w.clone();
                    v.splice(i..i + 2, [c]);
                    successors.push(v);
                }
            }
        }
        if successors.is_empty() {
            out.insert(w);
        } else {
            stack.extend(successors);
        }
    }
    out
}

/// Builds the label group and the cocycle `c`, checking the cocycle identity
/// on every composable pair and local confluence of the rewriting rules.
///
/// The rules are length-decreasing, so confluence follows from unique normal
/// forms on the overlaps, all of which are words of length at most three.
pub fn build_cocycle(gpd: &FiniteGroupoid, p: &BisectionPartition) -> Result<LabelCocycle> {
    let violations = validate_partition(gpd, p)?;
    if let Some(v) = violations.first() {
        return Err(Error::Partition(v.describe(p)));
    }
    let owner = p.block_of(gpd.arrow_count())?;
    let sets: Vec<BTreeSet<usize>> = p.blocks.iter().map(|b| b.iter().copied().collect()).collect();
    let set_index: HashMap<&BTreeSet<usize>, usize> = sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let inverse: Vec<u32> = p
        .blocks
        .iter()
        .map(|b| {
            let inv: BTreeSet<usize> = b.iter().map(|&i| gpd.inverse(i)).collect();
            set_index[&inv] as u32
        })
        .collect();
    let mut products = HashMap::new();
    for (&(g, h), &k) in gpd.composition_table() {
        products.insert((owner[g] as u32, owner[h] as u32), owner[k] as u32);
    }
    let presentation = Arc::new(LabelPresentation::new(
        p.names.clone(),
        inverse,
        p.unit_block as u32,
        products,
    )?);
    let group = GroupDescriptor::Presented(presentation.clone());
    let values: Vec<GroupElement> = owner
        .iter()
        .map(|&b| GroupElement::Label(presentation.normalize([b as u32])))
        .collect();

    let mut report = CocycleReport::default();
    for (&(g, h), &k) in gpd.composition_table() {
        if group.multiply(&values[g], &values[h])? != values[k] {
            report.product_failures.push((g, h));
        }
    }
    for i in 0..gpd.arrow_count() {
        if group.inverse(&values[i])? != values[gpd.inverse(i)] {
            report.inverse_failures.push(i);
        }
    }
    let n = p.blocks.len() as u32;
    let mut words: Vec<Vec<u32>> = Vec::new();
    for a in 0..n {
        words.push(vec![a]);
        for b in 0..n {
            words.push(vec![a, b]);
            for c in 0..n {
                words.push(vec![a, b, c]);
            }
        }
    }
    for w in words {
        let forms = all_normal_forms(&presentation, w.clone());
        if forms.len() > 1 {
            report.critical_pairs.push((w, forms.into_iter().collect()));
        }
    }
    let mut firsts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for b in 0..p.blocks.len() {
        if b == p.unit_block {
            continue;
        }
        let nf = presentation.normalize([b as u32]);
        if let Some(&other) = firsts.get(&nf) {
            report.label_collisions.push((other, b));
        } else {
            firsts.insert(nf, b);
        }
    }
    let kernel: BTreeSet<usize> = (0..gpd.arrow_count()).filter(|&i| group.is_identity(&values[i])).collect();
    let units: BTreeSet<usize> = (0..gpd.unit_count()).map(|u| gpd.unit_arrow(u)).collect();
    report.kernel_is_unit_space = kernel == units;
    Ok(LabelCocycle { presentation, group, block_of: owner, values, report })
}

/// The partial action `θ` of the label group on the units: for a realised
/// label `h`, `θ_h` sends `s(γ)` to `r(γ)` for each `γ ∈ c^-1(h)`.
pub fn cocycle_to_action(gpd: &FiniteGroupoid, c: &LabelCocycle) -> Result<FinitePds> {
    let mut fibers: BTreeMap<GroupElement, Vec<usize>> = BTreeMap::new();
    for (i, h) in c.values.iter().enumerate() {
        fibers.entry(h.clone()).or_default().push(i);
    }
    let space = FiniteSpace::new(gpd.units().iter().cloned())?;
    let mut entries = Vec::new();
    for (h, fiber) in fibers {
        let map = PartialBijection::from_pairs(fiber.iter().map(|&i| (gpd.source(i), gpd.range(i)))).map_err(|_| {
            Error::Partition(format!(
                "fiber of `{}` is not a bisection",
                c.group.format_element(&h)
            ))
        })?;
        entries.push((h, map));
    }
    let pds = FinitePds::explicit(space, c.group.clone(), entries)?;
    if pds.map(&c.group.identity()) != Some(&PartialBijection::identity(gpd.unit_count())) {
        return Err(Error::Partition("c^-1(e) is not the unit space".into()));
    }
    if let Some(v) = pds.validate().first() {
        return Err(Error::InvalidSystem(v.describe(&pds)));
    }
    Ok(pds)
}

/// `Φ(γ) = (c(γ), s(γ))` together with its inverse `(h, x) ↦ (s|_{c^-1(h)})^-1(x)`.
#[derive(Clone, Debug)]
pub struct PhiIsomorphism {
    pub target: FiniteGroupoid,
    pub phi: GroupoidHom,
    pub inverse: GroupoidHom,
}

/// Builds `Φ` onto the transformation groupoid of `pds` and verifies that it is
/// a bijective homomorphism whose inverse is given by the fiber formula.
pub fn build_phi(gpd: &FiniteGroupoid, c: &LabelCocycle, pds: &FinitePds) -> Result<PhiIsomorphism> {
    let target = transformation_groupoid(pds)?;
    let mut index = HashMap::new();
    for (j, a) in target.arrows().iter().enumerate() {
        if let Some(p) = &a.payload {
            index.insert(p.clone(), j);
        }
    }
    let mut arrow_map = Vec::with_capacity(gpd.arrow_count());
    for i in 0..gpd.arrow_count() {
        let j = index
            .get(&(c.values[i].clone(), gpd.source(i)))
            .copied()
            .ok_or_else(|| Error::Partition(format!("no arrow for `{}`", gpd.arrow(i).label)))?;
        arrow_map.push(j);
    }
    let phi = GroupoidHom { unit_map: (0..gpd.unit_count()).collect(), arrow_map };

    let mut by_fiber: HashMap<(GroupElement, usize), usize> = HashMap::new();
    for i in 0..gpd.arrow_count() {
        if by_fiber.insert((c.values[i].clone(), gpd.source(i)), i).is_some() {
            return Err(Error::Partition("s is not injective on a fiber of c".into()));
        }
    }
    let mut inv_arrows = Vec::with_capacity(target.arrow_count());
    for a in target.arrows() {
        let p = a.payload.clone().expect("transformation groupoid");
        inv_arrows.push(*by_fiber.get(&p).ok_or_else(|| Error::Partition("fiber lookup failed".into()))?);
    }
    let inverse = GroupoidHom { unit_map: (0..gpd.unit_count()).collect(), arrow_map: inv_arrows };

    if !validate_hom(gpd, &target, &phi).is_empty() || !validate_hom(&target, gpd, &inverse).is_empty() {
        return Err(Error::Partition("Φ is not a homomorphism".into()));
    }
    if inverse.after(&phi) != GroupoidHom::identity(gpd) || phi.after(&inverse) != GroupoidHom::identity(&target) {
        return Err(Error::Partition("Φ and its fiber inverse do not compose to identities".into()));
    }
    Ok(PhiIsomorphism { target, phi, inverse })
}

/// Output of the full recognition pipeline.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub cocycle: LabelCocycle,
    pub action: FinitePds,
    pub phi: PhiIsomorphism,
}

/// Partition check, cocycle, action and `Φ` in sequence.
pub fn recognize(gpd: &FiniteGroupoid, p: &BisectionPartition) -> Result<Recognition> {
    let cocycle = build_cocycle(gpd, p)?;
    let action = cocycle_to_action(gpd, &cocycle)?;
    let phi = build_phi(gpd, &cocycle, &action)?;
    Ok(Recognition { cocycle, action, phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{find_groupoid_isomorphism, group_as_groupoid, pair_groupoid, unit_groupoid};
    use crate::groups::FiniteGroup;
    use crate::pds::instances::*;

    fn z2() -> FiniteGroupoid {
        group_as_groupoid(&FiniteGroup::cyclic(2))
    }

    #[test]
    fn partition_examples() {
        let g = z2();
        let p = singleton_partition(&g);
        assert_eq!(p.blocks.len(), 2);
        assert!(validate_partition(&g, &p).unwrap().is_empty());

        let pair = pair_groupoid(2);
        let p = singleton_partition(&pair);
        assert_eq!(p.blocks.len(), 3);
        assert!(validate_partition(&pair, &p).unwrap().is_empty());

        let lumped = BisectionPartition {
            names: vec!["X".into(), "V".into()],
            blocks: vec![vec![pair.unit_arrow(0)], (0..4).filter(|&i| i != pair.unit_arrow(0)).collect()],
            unit_block: 0,
        };
        let v = validate_partition(&pair, &lumped).unwrap();
        assert!(v.contains(&PartitionViolation::UnitBlock));
        assert!(v.contains(&PartitionViolation::NotBisection { block: 1 }));

        assert_eq!(singleton_partition(&group_as_groupoid(&FiniteGroup::cyclic(3))).blocks.len(), 3);
        assert_eq!(singleton_partition(&unit_groupoid(2)).blocks.len(), 1);
    }

    #[test]
    fn absorption_failure_is_named() {
        // in Z/3, lumping g and g2 into one block breaks absorption and bisection
        let g = group_as_groupoid(&FiniteGroup::cyclic(3));
        let p = BisectionPartition {
            names: vec!["X".into(), "V".into()],
            blocks: vec![vec![0], vec![1, 2]],
            unit_block: 0,
        };
        let v = validate_partition(&g, &p).unwrap();
        assert!(v.contains(&PartitionViolation::ProductNotAbsorbed { left: 1, right: 1 }));
        assert!(v[v.len() - 1].describe(&p).contains("UV ⊆ W"));
    }

    #[test]
    fn z2_pipeline() {
        let g = z2();
        let r = recognize(&g, &singleton_partition(&g)).unwrap();
        assert!(r.cocycle.report.is_clean());
        let gamma = r.cocycle.values[1].clone();
        assert_eq!(gamma, GroupElement::Label(vec![1]));
        assert_eq!(r.cocycle.group.multiply(&gamma, &gamma).unwrap(), r.cocycle.group.identity());
        assert_eq!(r.action.act(&gamma, 0), Some(0));
        assert_eq!(r.phi.target.arrow_count(), 2);
        assert!(r.cocycle.values[0] == r.cocycle.group.identity());
    }

    #[test]
    fn pair_groupoid_pipeline() {
        let g = pair_groupoid(2);
        let r = recognize(&g, &singleton_partition(&g)).unwrap();
        assert!(r.cocycle.report.is_clean());
        let u = g.lookup_arrow("p0_1").unwrap();
        let cu = r.cocycle.values[u].clone();
        let cv = r.cocycle.values[g.lookup_arrow("p1_0").unwrap()].clone();
        assert_eq!(r.cocycle.group.inverse(&cu).unwrap(), cv);
        // no relation makes [U] torsion
        assert_ne!(r.cocycle.group.pow(&cu, 2).unwrap(), r.cocycle.group.identity());
        assert_eq!(r.action.map(&cu).unwrap().pairs().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(r.phi.target.arrow_count(), 4);
        assert!(find_groupoid_isomorphism(&g, &r.phi.target).unwrap().is_some());
    }

    #[test]
    fn canonical_partition_round_trip() {
        for pds in [swap(), trivial(FiniteGroup::klein_four(), 2)] {
            let g = transformation_groupoid(&pds).unwrap();
            let p = canonical_partition(&g).unwrap();
            assert!(validate_partition(&g, &p).unwrap().is_empty());
            let r = recognize(&g, &p).unwrap();
            assert!(r.cocycle.report.is_clean());
            assert!(find_groupoid_isomorphism(&g, &r.phi.target).unwrap().is_some());
        }
    }

    #[test]
    fn principal_singleton_actions_have_singleton_domains() {
        let g = pair_groupoid(3);
        let r = recognize(&g, &singleton_partition(&g)).unwrap();
        for (h, m) in r.action.table() {
            if !r.cocycle.group.is_identity(h) {
                assert!(m.len() <= 1);
            }
        }
    }
}
