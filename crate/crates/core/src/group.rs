//! Permutation-group kernel: composition and cycle structure, deterministic
//! Schreier-Sims stabilizer chains (exact order, membership, enumeration),
//! point orbits, and product-replacement random element generation.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("permutation image vector is not a bijection on its domain")]
    NotABijection,
    #[error("group order exceeds the enumeration cap {cap}")]
    OrderExceedsCap { cap: u64 },
}

/// A permutation of the points `0..degree`, stored as its image vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cycles = self.cycles(false);
        if cycles.cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in &cycles.cycles {
            write!(f, "(")?;
            for (i, p) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Validates that `images` is a bijection.
    pub fn from_images(images: Vec<u32>) -> Result<Self, GroupError> {
        let mut seen = vec![false; images.len()];
        for &img in &images {
            if img as usize >= images.len() || seen[img as usize] {
                return Err(GroupError::NotABijection);
            }
            seen[img as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of `0..degree` from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Self {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for i in 0..cycle.len() {
                images[cycle[i] as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i as u32 == img)
    }

    /// `self.compose(other)` applies `other` first: `(self ∘ other)(p) =
    /// self(other(p))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "permutation domain mismatch");
        Perm {
            images: other.images.iter().map(|&p| self.images[p as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn smallest_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &img)| *i as u32 != img)
            .map(|(i, _)| i as u32)
    }

    /// Disjoint cycles in order of smallest member, each starting at its
    /// smallest member. Fixed points appear as 1-cycles iff `include_fixed`.
    pub fn cycles(&self, include_fixed: bool) -> CycleDecomposition {
        let mut seen = vec![false; self.images.len()];
        let mut cycles = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start as u32];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p as u32);
                p = self.apply(p);
            }
            if cycle.len() > 1 || include_fixed {
                cycles.push(cycle);
            }
        }
        CycleDecomposition { cycles }
    }
}

/// Disjoint-cycle form of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<u32>>,
}

struct Level {
    base: u32,
    gens: Vec<Perm>,
    /// Coset representative per point: `transversal[p]` maps `base` to `p`.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<u32>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        Level {
            base,
            gens: Vec::new(),
            transversal: vec![None; degree],
            orbit: Vec::new(),
        }
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.orbit = vec![self.base];
        self.transversal[self.base as usize] = Some(Perm::identity(degree));
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head] as usize;
            head += 1;
            let up = self.transversal[p].clone().unwrap();
            for gen in &self.gens {
                let q = gen.apply(p);
                if self.transversal[q].is_none() {
                    self.transversal[q] = Some(gen.compose(&up));
                    self.orbit.push(q as u32);
                }
            }
        }
    }
}

/// A permutation group represented by a base and strong generating set.
///
/// Base points are chosen deterministically (smallest moved point whenever
/// the chain is extended), so equal generator lists produce identical chains.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

/// Builds the stabilizer chain for the group generated by `gens`.
pub fn schreier_sims(degree: usize, gens: &[Perm]) -> PermGroup {
    let generators: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    let mut group = PermGroup {
        degree,
        generators: generators.clone(),
        levels: Vec::new(),
    };
    for gen in &generators {
        group.place_generator(0, gen.clone());
    }
    for level in &mut group.levels {
        level.rebuild(degree);
    }
    group.complete();
    group
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        schreier_sims(degree, &[])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Adds `gen` to the generator lists of the levels it belongs to (those
    /// whose preceding base points it fixes), extending the base if needed.
    fn place_generator(&mut self, from_level: usize, gen: Perm) {
        debug_assert!(!gen.is_identity());
        let mut level = from_level;
        loop {
            if level == self.levels.len() {
                let base = gen.smallest_moved_point().expect("identity placed in chain");
                self.levels.push(Level::new(base, self.degree));
            }
            let moves_base = gen.apply(self.levels[level].base as usize) != self.levels[level].base as usize;
            self.levels[level].gens.push(gen.clone());
            if moves_base {
                return;
            }
            level += 1;
        }
    }

    /// Sifts `g` through levels `from..`, returning the residue and the
    /// level at which sifting stopped.
    fn strip(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let image = h.apply(level.base as usize);
            match &level.transversal[image] {
                None => return (h, l),
                Some(u) => h = u.inverse().compose(&h),
            }
        }
        (h, self.levels.len())
    }

    /// Deterministic Schreier-Sims closure: verifies every Schreier
    /// generator sifts to the identity, inserting residues as new strong
    /// generators until the chain is complete.
    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let mut restart_at: Option<usize> = None;
            'scan: for oi in 0..self.levels[li].orbit.len() {
                let p = self.levels[li].orbit[oi] as usize;
                let up = self.levels[li].transversal[p].clone().unwrap();
                for gi in 0..self.levels[li].gens.len() {
                    let s = self.levels[li].gens[gi].clone();
                    let q = s.apply(p);
                    let uq = self.levels[li].transversal[q].clone().unwrap();
                    let schreier = uq.inverse().compose(&s).compose(&up);
                    if schreier.is_identity() {
                        continue;
                    }
                    let (residue, drop) = self.strip(&schreier, li + 1);
                    if residue.is_identity() {
                        continue;
                    }
                    self.place_generator(li + 1, residue);
                    for l in li + 1..self.levels.len() {
                        self.levels[l].rebuild(self.degree);
                    }
                    restart_at = Some(drop.min(self.levels.len() - 1));
                    break 'scan;
                }
            }
            match restart_at {
                Some(l) => i = l as isize,
                None => i -= 1,
            }
        }
    }

    /// Exact group order: the product of fundamental orbit sizes.
    pub fn order(&self) -> BigUint {
        let mut order = BigUint::one();
        for level in &self.levels {
            order *= BigUint::from(level.orbit.len());
        }
        order
    }

    pub fn is_member(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, _) = self.strip(g, 0);
        residue.is_identity()
    }

    /// Enumerates every group element exactly once as products of coset
    /// representatives along the chain.
    pub fn enumerate_elements(&self, cap: u64) -> Result<Vec<Perm>, GroupError> {
        if self.order() > BigUint::from(cap) {
            return Err(GroupError::OrderExceedsCap { cap });
        }
        let mut elements = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(elements.len() * level.orbit.len());
            for &p in &level.orbit {
                let u = level.transversal[p as usize].as_ref().unwrap();
                for tail in &elements {
                    next.push(u.compose(tail));
                }
            }
            elements = next;
        }
        Ok(elements)
    }
}

/// Orbit partition of `points` under the group generated by `gens`.
///
/// Orbits are returned sorted by smallest member, members ascending; points
/// whose orbit leaves the given set only contribute their members inside it.
pub fn point_orbits(gens: &[Perm], points: &[u32]) -> Vec<Vec<u32>> {
    if points.is_empty() {
        return Vec::new();
    }
    let degree = gens.first().map_or_else(
        || *points.iter().max().unwrap() as usize + 1,
        |g| g.degree(),
    );
    let mut parent: Vec<u32> = (0..degree as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for gen in gens {
        for p in 0..degree as u32 {
            let q = gen.apply(p as usize) as u32;
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                parent[rp.max(rq) as usize] = rp.min(rq);
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<u32, Vec<u32>> = std::collections::BTreeMap::new();
    let mut sorted_points: Vec<u32> = points.to_vec();
    sorted_points.sort_unstable();
    sorted_points.dedup();
    for &p in &sorted_points {
        by_root.entry(find(&mut parent, p)).or_default().push(p);
    }
    let mut orbits: Vec<Vec<u32>> = by_root.into_values().collect();
    orbits.sort_by_key(|orbit| orbit[0]);
    orbits
}

/// Parameters of the product-replacement random walk.
#[derive(Clone, Copy, Debug)]
pub struct PrConfig {
    pub slots: usize,
    pub burn_in: usize,
    pub steps_per_draw: usize,
}

impl Default for PrConfig {
    fn default() -> Self {
        PrConfig {
            slots: 10,
            burn_in: 60,
            steps_per_draw: 2,
        }
    }
}

/// Product-replacement ("shake and rattle") sampler of near-uniform group
/// elements. One sampler serves one generator list; create a fresh sampler
/// per group.
pub struct ProductReplacement {
    slots: Vec<Perm>,
    acc: Perm,
    steps_per_draw: usize,
}

impl ProductReplacement {
    pub fn new<R: Rng>(gens: &[Perm], degree: usize, cfg: &PrConfig, rng: &mut R) -> Self {
        assert!(cfg.slots >= 2, "product replacement needs at least two slots");
        let nonid: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let slots = if nonid.is_empty() {
            vec![Perm::identity(degree); cfg.slots]
        } else {
            (0..cfg.slots.max(nonid.len()))
                .map(|i| nonid[i % nonid.len()].clone())
                .collect()
        };
        let mut sampler = ProductReplacement {
            slots,
            acc: Perm::identity(degree),
            steps_per_draw: cfg.steps_per_draw.max(1),
        };
        for _ in 0..cfg.burn_in {
            sampler.step(rng);
        }
        sampler
    }

    fn step<R: Rng>(&mut self, rng: &mut R) {
        let n = self.slots.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let other = if rng.gen::<bool>() {
            self.slots[j].inverse()
        } else {
            self.slots[j].clone()
        };
        if rng.gen::<bool>() {
            self.slots[i] = self.slots[i].compose(&other);
            self.acc = self.acc.compose(&self.slots[i]);
        } else {
            self.slots[i] = other.compose(&self.slots[i]);
            self.acc = self.slots[i].compose(&self.acc);
        }
    }

    /// Advances the walk and returns the accumulator as the next sample.
    pub fn next<R: Rng>(&mut self, rng: &mut R) -> Perm {
        for _ in 0..self.steps_per_draw {
            self.step(rng);
        }
        self.acc.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn compose_and_inverse() {
        let swap = Perm::from_cycles(3, &[&[0, 1]]);
        assert!(swap.compose(&swap).is_identity());
        let rot = Perm::from_cycles(3, &[&[0, 1, 2]]);
        assert_eq!(rot.inverse(), Perm::from_cycles(3, &[&[0, 2, 1]]));
        assert!(rot.compose(&rot.inverse()).is_identity());
        // compose applies the right-hand side first
        let a = Perm::from_cycles(3, &[&[0, 1]]);
        let b = Perm::from_cycles(3, &[&[1, 2]]);
        assert_eq!(a.compose(&b).apply(1), 2);
        assert_eq!(b.compose(&a).apply(1), 0);
    }

    #[test]
    fn cycle_decomposition() {
        let p = Perm::from_images(vec![1, 2, 0, 3]).unwrap();
        let moved = p.cycles(false);
        assert_eq!(moved.cycles, vec![vec![0, 1, 2]]);
        let all = p.cycles(true);
        assert_eq!(all.cycles, vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn bijection_validation() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![2, 0]).is_err());
        assert!(Perm::from_images(vec![1, 0]).is_ok());
    }

    #[test]
    fn schreier_sims_s3() {
        let gens = vec![
            Perm::from_cycles(3, &[&[0, 1]]),
            Perm::from_cycles(3, &[&[0, 1, 2]]),
        ];
        let group = schreier_sims(3, &gens);
        assert_eq!(group.order(), BigUint::from(6u32));
        assert!(group.is_member(&Perm::from_cycles(3, &[&[1, 2]])));
        assert!(group.is_member(&Perm::identity(3)));
    }

    #[test]
    fn schreier_sims_trivial_and_s4() {
        assert_eq!(schreier_sims(5, &[]).order(), BigUint::one());
        let gens = vec![
            Perm::from_cycles(4, &[&[0, 1]]),
            Perm::from_cycles(4, &[&[0, 1, 2, 3]]),
        ];
        let s4 = schreier_sims(4, &gens);
        assert_eq!(s4.order(), BigUint::from(24u32));
        // A proper subgroup element and a non-member of a subgroup.
        let a4_gens = vec![
            Perm::from_cycles(4, &[&[0, 1, 2]]),
            Perm::from_cycles(4, &[&[1, 2, 3]]),
        ];
        let a4 = schreier_sims(4, &a4_gens);
        assert_eq!(a4.order(), BigUint::from(12u32));
        assert!(!a4.is_member(&Perm::from_cycles(4, &[&[0, 1]])));
    }

    #[test]
    fn enumerate_elements_exactly_once() {
        let gens = vec![
            Perm::from_cycles(3, &[&[0, 1]]),
            Perm::from_cycles(3, &[&[0, 1, 2]]),
        ];
        let group = schreier_sims(3, &gens);
        let elements = group.enumerate_elements(100).unwrap();
        assert_eq!(elements.len(), 6);
        let set: std::collections::HashSet<Vec<u32>> =
            elements.iter().map(|p| p.images().to_vec()).collect();
        assert_eq!(set.len(), 6);

        let trivial = schreier_sims(4, &[]);
        assert_eq!(trivial.enumerate_elements(10).unwrap(), vec![Perm::identity(4)]);

        assert_eq!(
            group.enumerate_elements(5),
            Err(GroupError::OrderExceedsCap { cap: 5 })
        );
    }

    #[test]
    fn point_orbit_partition() {
        let gens = vec![
            Perm::from_cycles(3, &[&[0, 1]]),
            Perm::from_cycles(3, &[&[0, 1, 2]]),
        ];
        assert_eq!(point_orbits(&gens, &[0, 1, 2]), vec![vec![0, 1, 2]]);
        assert_eq!(
            point_orbits(&[], &[0, 1, 2]),
            vec![vec![0], vec![1], vec![2]]
        );
        let swap01 = vec![Perm::from_cycles(4, &[&[0, 1], &[2, 3]])];
        assert_eq!(point_orbits(&swap01, &[0, 1, 2, 3]), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(point_orbits(&swap01, &[0, 1]), vec![vec![0, 1]]);
    }

    #[test]
    fn product_replacement_s3_frequencies() {
        let gens = vec![
            Perm::from_cycles(3, &[&[0, 1]]),
            Perm::from_cycles(3, &[&[0, 1, 2]]),
        ];
        let group = schreier_sims(3, &gens);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sampler = ProductReplacement::new(&gens, 3, &PrConfig::default(), &mut rng);
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        let draws = 6000;
        for _ in 0..draws {
            let p = sampler.next(&mut rng);
            assert!(group.is_member(&p));
            *counts.entry(p.images().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = draws as f64 / 6.0;
        for &count in counts.values() {
            assert!(
                (count as f64 - expected).abs() <= expected * 0.05,
                "frequency {count} outside 5% of {expected}"
            );
        }
    }

    #[test]
    fn product_replacement_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut sampler = ProductReplacement::new(&[], 4, &PrConfig::default(), &mut rng);
        for _ in 0..20 {
            assert!(sampler.next(&mut rng).is_identity());
        }

        let gens = vec![Perm::from_cycles(2, &[&[0, 1]])];
        let mut sampler = ProductReplacement::new(&gens, 2, &PrConfig::default(), &mut rng);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            seen.insert(sampler.next(&mut rng).images().to_vec());
        }
        assert_eq!(seen.len(), 2);
    }
}
