//! The standard test corpus: quantum permutations (some paired with a graph) and sampled
//! deck transformations, all derived from one seed.

use std::fs;
use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use qsym_core::deck::{
    example_equivariant_torus, example_four_sheeted_path, example_nontrivial_2sheet_circle,
    example_sphere_linebundle, example_trivial_2sheet_circle, FiberedQuantumPermutation, SampledBase,
};
use qsym_core::graphs::{automorphism_search, find_cherries, find_disjoint_pairs, Graph};
use qsym_core::linalg::{random_gaussian_with, random_unitary};
use qsym_core::qaut::disjoint_pair_qaut;
use qsym_core::weyl::{weyl_qperm, FiniteAbelianGroup};
use qsym_core::{ComplexMatrix, Permutation, QuantumPermutation, Result, TolerancePolicy};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct QpermEntry {
    pub name: String,
    pub operation: &'static str,
    pub params: Value,
    pub qperm: QuantumPermutation,
    pub graph: Option<(String, Graph)>,
}

#[derive(Clone, Debug)]
pub struct DeckEntry {
    pub name: String,
    pub operation: &'static str,
    pub params: Value,
    pub deck: FiberedQuantumPermutation,
}

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub qperms: Vec<QpermEntry>,
    pub decks: Vec<DeckEntry>,
}

#[derive(Serialize)]
struct ManifestFile {
    file: String,
    kind: &'static str,
    operation: &'static str,
    params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_file: Option<String>,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    files: Vec<ManifestFile>,
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    Permutation::new(v).expect("shuffle")
}

fn random_line(d: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    ComplexMatrix::projection_onto(&random_gaussian_with(d, 1, rng).column_vec(0))
}

fn classical(p: &Permutation) -> QuantumPermutation {
    QuantumPermutation::from_permutation(p).expect("permutation")
}

pub fn build(seed: u64) -> Result<Corpus> {
    let tol = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Corpus::default();
    let mut add = |name: &str, operation, params, qperm, graph: Option<(&str, Graph)>| {
        c.qperms.push(QpermEntry {
            name: name.to_string(),
            operation,
            params,
            qperm,
            graph: graph.map(|(n, g)| (n.to_string(), g)),
        });
    };

    for (name, p) in [
        ("classical-id1", Permutation::identity(1)),
        ("classical-id2", Permutation::identity(2)),
        ("classical-swap2", Permutation::shift(2, 1)),
        ("classical-cycle3", Permutation::shift(3, 1)),
        ("classical-transposition3", Permutation::transposition(3, 0, 1)?),
        ("classical-cycle4", Permutation::shift(4, 1)),
        ("classical-random5", random_perm(5, &mut rng)),
        ("classical-random6", random_perm(6, &mut rng)),
    ] {
        add(name, "from_permutation", json!({ "images": p.images() }), classical(&p), None);
    }
    let sum3 = classical(&Permutation::identity(3)).direct_sum(&classical(&Permutation::shift(3, 1)))?;
    add("classical-sum3", "direct_sum", json!({ "parts": ["identity(3)", "cycle(3)"] }), sum3, None);

    for d in [2, 3] {
        let p = random_line(d, &mut rng)?;
        add(&format!("two-point-d{d}"), "two_point", json!({ "d": d, "rank": 1 }), QuantumPermutation::two_point(&p)?, None);
    }
    let (p, q) = (random_line(2, &mut rng)?, random_line(2, &mut rng)?);
    let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)])?;
    add(
        "blocks-2k2",
        "four_point_blocks",
        json!({ "d": 2, "rank": 1 }),
        QuantumPermutation::four_point_blocks(&p, &q)?,
        Some(("2K2", two_k2.clone())),
    );

    let z2 = FiniteAbelianGroup::cyclic(2)?;
    let z3 = FiniteAbelianGroup::cyclic(3)?;
    let z2z2 = FiniteAbelianGroup::new(vec![2, 2])?;
    let mut weyl_z2 = Vec::new();
    for (group, label, count) in [(&z2, "z2", 3), (&z3, "z3", 2), (&z2z2, "z2xz2", 1)] {
        for i in 0..count {
            let g_seed = rng.next_u64();
            let g = random_unitary(group.order(), g_seed)?;
            let q = weyl_qperm(group, &g, &tol)?;
            if label == "z2" {
                weyl_z2.push(q.clone());
            }
            add(
                &format!("weyl-{label}-{i}"),
                "weyl_qperm",
                json!({ "group": group.cyclic_orders(), "g_seed": g_seed }),
                q,
                None,
            );
        }
    }
    add("sum-weyl-z2", "direct_sum", json!({ "parts": ["weyl-z2-0", "weyl-z2-1"] }), weyl_z2[0].direct_sum(&weyl_z2[1])?, None);
    add(
        "sum-weyl-classical",
        "direct_sum",
        json!({ "parts": ["weyl-z2-0", "classical-cycle4"] }),
        weyl_z2[0].direct_sum(&classical(&Permutation::shift(4, 1)))?,
        None,
    );
    add("tensor-weyl-z2", "tensor", json!({ "parts": ["weyl-z2-0", "weyl-z2-1"] }), weyl_z2[0].tensor(&weyl_z2[1])?, None);
    add("conjugate-weyl-z2", "conjugate", json!({ "part": "weyl-z2-0" }), weyl_z2[0].conjugate(), None);

    let two_k3 = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])?;
    let cherry_tree = Graph::double_cherry_tree();
    let cherries = find_cherries(&cherry_tree);
    let (c0, c1) = (cherries[0].flip(cherry_tree.n()), cherries[1].flip(cherry_tree.n()));
    let rotate = |offset: usize| {
        Permutation::new((0..6).map(|v| if v / 3 == offset { offset * 3 + (v + 1) % 3 } else { v }).collect())
            .expect("3-cycle")
    };
    for (name, label, graph, sigma, tau, k) in [
        ("disjoint-2k2-k2", "2K2", two_k2.clone(), Permutation::transposition(4, 0, 1)?, Permutation::transposition(4, 2, 3)?, 2),
        ("disjoint-double-cherry-k2", "double-cherry", cherry_tree.clone(), c0, c1, 2),
        ("disjoint-2k3-k3", "2K3", two_k3.clone(), rotate(0), rotate(1), 3),
        ("disjoint-2k3-k2", "2K3", two_k3.clone(), rotate(0), rotate(1), 2),
    ] {
        let q = disjoint_pair_qaut(&graph, &sigma, &tau, k)?;
        let params = json!({ "sigma": sigma.images(), "tau": tau.images(), "k": k });
        add(name, "disjoint_pair_qaut", params, q, Some((label, graph)));
    }

    let c5 = Graph::cycle(5)?;
    add("aut-c5-rotation", "from_permutation", json!({ "images": Permutation::shift(5, 1).images() }), classical(&Permutation::shift(5, 1)), Some(("C5", c5)));
    let petersen = Graph::petersen();
    let autos = automorphism_search(&petersen, 2)?;
    let pet = autos.maps.into_iter().find(|p| !p.is_identity()).expect("Petersen has symmetries");
    add("aut-petersen", "from_permutation", json!({ "images": pet.images() }), classical(&pet), Some(("petersen", petersen)));
    let cot = Graph::cherry_on_triangle();
    let cot_autos = automorphism_search(&cot, 64)?;
    let pairs = find_disjoint_pairs(&cot_autos.maps);
    let flip = pairs
        .first()
        .map(|&(a, _)| cot_autos.maps[a].clone())
        .or_else(|| cot_autos.maps.iter().find(|p| !p.is_identity()).cloned())
        .expect("cherry flip");
    add("aut-cherry-triangle", "from_permutation", json!({ "images": flip.images() }), classical(&flip), Some(("cherry-on-triangle", cot)));

    let g_torus = rng.next_u64();
    let g_path = rng.next_u64();
    c.decks.push(DeckEntry {
        name: "deck-circle2".into(),
        operation: "example_trivial_2sheet_circle",
        params: json!({ "samples": 64 }),
        deck: example_trivial_2sheet_circle(64)?,
    });
    c.decks.push(DeckEntry {
        name: "deck-circle2nt".into(),
        operation: "example_nontrivial_2sheet_circle",
        params: json!({ "samples": 64 }),
        deck: example_nontrivial_2sheet_circle(64)?,
    });
    c.decks.push(DeckEntry {
        name: "deck-sphere".into(),
        operation: "example_sphere_linebundle",
        params: json!({ "rings": 8, "meridians": 8 }),
        deck: example_sphere_linebundle(&SampledBase::sphere(8, 8)?)?,
    });
    c.decks.push(DeckEntry {
        name: "deck-torus".into(),
        operation: "example_equivariant_torus",
        params: json!({ "samples": [8, 8], "g_seed": g_torus }),
        deck: example_equivariant_torus(8, 8, &random_unitary(2, g_torus)?, &tol)?,
    });
    c.decks.push(DeckEntry {
        name: "deck-z4".into(),
        operation: "example_four_sheeted_path",
        params: json!({ "samples": 64, "g_seed": g_path }),
        deck: example_four_sheeted_path(64, &random_unitary(2, g_path)?, &tol)?,
    });
    Ok(c)
}

fn write_json(path: &Path, value: &impl Serialize) -> std::result::Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(qsym_core::Error::from)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Writes `qperm/`, `graphs/`, `deck/` and `manifest.json` under `out`.
pub fn write(seed: u64, out: &Path) -> std::result::Result<Corpus, CliError> {
    let corpus = build(seed)?;
    for sub in ["qperm", "graphs", "deck"] {
        let dir = out.join(sub);
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    }
    let mut files = Vec::new();
    let mut written_graphs: Vec<String> = Vec::new();
    for e in &corpus.qperms {
        let file = format!("qperm/{}.json", e.name);
        write_json(&out.join(&file), &e.qperm)?;
        let graph_file = match &e.graph {
            Some((label, g)) => {
                let gf = format!("graphs/{label}.json");
                if !written_graphs.contains(&gf) {
                    write_json(&out.join(&gf), g)?;
                    written_graphs.push(gf.clone());
                }
                Some(gf)
            }
            None => None,
        };
        files.push(ManifestFile { file, kind: "qperm", operation: e.operation, params: e.params.clone(), graph_file });
    }
    for e in &corpus.decks {
        let file = format!("deck/{}.json", e.name);
        write_json(&out.join(&file), &e.deck)?;
        files.push(ManifestFile { file, kind: "fibered", operation: e.operation, params: e.params.clone(), graph_file: None });
    }
    write_json(&out.join("manifest.json"), &Manifest { seed, files })?;
    Ok(corpus)
}
