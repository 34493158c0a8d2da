//! Property suite for the Merkle disclosure layer.
//!
//! Generated SBOMs cover 1–64 attributes; every run exercises at least 512
//! cases per property. The three core guarantees: any disclosed subset
//! round-trips through proof verification, every component query is answered
//! by exactly one of presence/absence, and sibling paths never exceed — and
//! somewhere reach — log₂ of the leaf count.

use std::collections::BTreeMap;

use proptest::prelude::*;

use trustchain_core::merkle::{
    build_commitment, prove_absence, prove_disclosure, prove_presence, verify_absence,
    verify_disclosure, verify_presence, MerkleError, SaltSeed,
};
use trustchain_core::sbom::{CanonicalSbom, ComponentId};
use trustchain_core::sha256;

/// Assemble a well-formed canonical SBOM from generated parts: attributes
/// sorted by path bytes, component ids sorted and deduplicated.
fn assemble(
    attributes: BTreeMap<String, String>,
    components: Vec<(String, String)>,
) -> CanonicalSbom {
    let mut component_ids: Vec<ComponentId> = components
        .into_iter()
        .filter_map(|(name, version)| ComponentId::new(name, version))
        .collect();
    component_ids.sort();
    component_ids.dedup();
    let attributes: Vec<(String, String)> = attributes.into_iter().collect();
    let source = serde_json::to_vec(&attributes).unwrap();
    CanonicalSbom {
        attributes,
        component_ids,
        source_digest: sha256(&source),
    }
}

fn path_strategy() -> impl Strategy<Value = String> {
    // Representative of flattened SPDX paths: slash-joined, no control bytes.
    proptest::string::string_regex("[a-z0-9][a-z0-9/._-]{0,23}").unwrap()
}

fn value_strategy() -> impl Strategy<Value = String> {
    // Values are verbatim scalars; include empties, spaces and non-ASCII.
    proptest::string::string_regex("[ -~£€þ]{0,24}").unwrap()
}

fn component_strategy() -> impl Strategy<Value = (String, String)> {
    (
        proptest::string::string_regex("[a-z]{1,8}").unwrap(),
        proptest::string::string_regex("[0-9]{1,2}(\\.[0-9]{1,2}){0,2}").unwrap(),
    )
}

fn sbom_strategy() -> impl Strategy<Value = CanonicalSbom> {
    (
        proptest::collection::btree_map(path_strategy(), value_strategy(), 1..=64),
        proptest::collection::vec(component_strategy(), 1..=8),
    )
        .prop_map(|(attributes, components)| assemble(attributes, components))
}

fn seed_strategy() -> impl Strategy<Value = SaltSeed> {
    any::<[u8; 32]>().prop_map(SaltSeed)
}

fn ceil_log2(n: u64) -> usize {
    (64 - (n - 1).leading_zeros()) as usize
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn disclosure_round_trips_for_any_subset(
        sbom in sbom_strategy(),
        seed in seed_strategy(),
        subset_seed in any::<u64>(),
    ) {
        let commitment = build_commitment(&sbom, seed).unwrap();
        // Deterministic pseudo-random subset of the attribute paths.
        let paths: Vec<String> = sbom
            .attributes
            .iter()
            .enumerate()
            .filter(|(i, _)| (subset_seed >> (i % 64)) & 1 == 1)
            .map(|(_, (p, _))| p.clone())
            .collect();
        let paths = if paths.is_empty() {
            vec![sbom.attributes[0].0.clone()]
        } else {
            paths
        };
        let proof = prove_disclosure(&sbom, &commitment, &paths).unwrap();
        let verified = verify_disclosure(&proof, &commitment.attribute_root).unwrap();
        // Exactly the selected pairs come back, in path order.
        let mut expected: Vec<(String, String)> = paths
            .iter()
            .map(|p| (p.clone(), sbom.value_at(p).unwrap().to_string()))
            .collect();
        expected.sort();
        expected.dedup();
        prop_assert_eq!(verified, expected);
    }

    #[test]
    fn tampered_disclosure_value_never_verifies(
        sbom in sbom_strategy(),
        seed in seed_strategy(),
        pick in any::<prop::sample::Index>(),
    ) {
        let commitment = build_commitment(&sbom, seed).unwrap();
        let target = pick.index(sbom.attributes.len());
        let paths = vec![sbom.attributes[target].0.clone()];
        let mut proof = prove_disclosure(&sbom, &commitment, &paths).unwrap();
        proof.entries[0].value.push('!');
        prop_assert_eq!(
            verify_disclosure(&proof, &commitment.attribute_root).unwrap_err(),
            MerkleError::RootMismatch
        );
    }

    #[test]
    fn presence_and_absence_are_a_dichotomy(
        sbom in sbom_strategy(),
        seed in seed_strategy(),
        query in component_strategy(),
    ) {
        let commitment = build_commitment(&sbom, seed).unwrap();
        let query = ComponentId::new(query.0, query.1).unwrap();
        let listed = sbom.component_ids.contains(&query);
        match (
            prove_presence(&sbom, &commitment, &query),
            prove_absence(&sbom, &commitment, &query),
        ) {
            (Ok(presence), Err(MerkleError::ActuallyPresent(_))) => {
                prop_assert!(listed);
                verify_presence(&presence, &commitment.index_root, &query).unwrap();
            }
            (Err(MerkleError::NotPresent(_)), Ok(absence)) => {
                prop_assert!(!listed);
                verify_absence(&absence, &commitment.index_root, &query).unwrap();
            }
            other => prop_assert!(false, "not a dichotomy: {:?}", other),
        }
    }

    #[test]
    fn an_absence_proof_only_answers_its_own_query(
        sbom in sbom_strategy(),
        seed in seed_strategy(),
    ) {
        let commitment = build_commitment(&sbom, seed).unwrap();
        let absent = ComponentId::new("definitely-not-here", "0").unwrap();
        let proof = prove_absence(&sbom, &commitment, &absent).unwrap();
        let other = ComponentId::new("definitely-not-here", "1").unwrap();
        prop_assert_eq!(
            verify_absence(&proof, &commitment.index_root, &other).unwrap_err(),
            MerkleError::QueryMismatch
        );
    }

    #[test]
    fn sibling_paths_are_logarithmic(
        sbom in sbom_strategy(),
        seed in seed_strategy(),
    ) {
        let commitment = build_commitment(&sbom, seed).unwrap();
        let all_paths: Vec<String> =
            sbom.attributes.iter().map(|(p, _)| p.clone()).collect();
        let proof = prove_disclosure(&sbom, &commitment, &all_paths).unwrap();
        let bound = if commitment.leaf_count == 1 {
            0
        } else {
            ceil_log2(commitment.leaf_count)
        };
        let longest = proof
            .entries
            .iter()
            .map(|e| e.sibling_path.len())
            .max()
            .unwrap();
        prop_assert!(proof.entries.iter().all(|e| e.sibling_path.len() <= bound));
        prop_assert_eq!(longest, bound);
    }

    #[test]
    fn proofs_do_not_transfer_between_commitments(
        sbom in sbom_strategy(),
        seed_a in seed_strategy(),
        seed_b in seed_strategy(),
    ) {
        prop_assume!(seed_a != seed_b);
        let commitment_a = build_commitment(&sbom, seed_a).unwrap();
        let commitment_b = build_commitment(&sbom, seed_b).unwrap();
        // Fresh salts, fresh roots: same document, different commitment.
        prop_assert_ne!(commitment_a.attribute_root, commitment_b.attribute_root);
        let paths = vec![sbom.attributes[0].0.clone()];
        let proof = prove_disclosure(&sbom, &commitment_a, &paths).unwrap();
        prop_assert_eq!(
            verify_disclosure(&proof, &commitment_b.attribute_root).unwrap_err(),
            MerkleError::RootMismatch
        );
    }
}
