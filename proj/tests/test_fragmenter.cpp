#include "mmpgen/fragmenter.hpp"

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <utility>

#include "test_util.hpp"

using namespace mmpgen;

namespace {

// Independent oracle: delete each single non-aromatic bond in turn, keep the
// deletion only if it splits the graph in two, apply the constraint
// predicate to both orientations. Shares only parse/canonical with the
// implementation under test.
std::multiset<std::pair<std::string, std::string>> brute_force_cut_pairs(
    const Molecule& m, const FragmentationConstraints& c) {
  std::multiset<std::pair<std::string, std::string>> out;
  int parent_heavy = heavy_atom_count(m);
  for (int bi = 0; bi < m.bond_count(); ++bi) {
    if (m.bonds[bi].order != BondOrder::Single) continue;
    // Split test by BFS with the bond removed.
    std::vector<char> seen(m.atom_count(), 0);
    std::vector<int> stack{m.bonds[bi].a};
    seen[m.bonds[bi].a] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (const auto& nb : m.neighbors(a)) {
        if (nb.bond == bi || seen[nb.atom]) continue;
        seen[nb.atom] = 1;
        ++reached;
        stack.push_back(nb.atom);
      }
    }
    if (reached == m.atom_count()) continue;  // bond lies on a cycle
    std::vector<int> side_a, side_b;
    for (int i = 0; i < m.atom_count(); ++i) (seen[i] ? side_a : side_b).push_back(i);
    for (int orient = 0; orient < 2; ++orient) {
      const auto& core_atoms = orient == 0 ? side_a : side_b;
      const auto& rgroup_atoms = orient == 0 ? side_b : side_a;
      int core_attach = orient == 0 ? m.bonds[bi].a : m.bonds[bi].b;
      int rgroup_attach = orient == 0 ? m.bonds[bi].b : m.bonds[bi].a;
      int ch = static_cast<int>(core_atoms.size());
      int rh = static_cast<int>(rgroup_atoms.size());
      if (ch > c.max_core_heavy || rh > c.max_rgroup_heavy) continue;
      if (!(static_cast<double>(rh) / parent_heavy < c.max_rgroup_ratio)) continue;
      Molecule core = detail::extract_fragment(m, core_atoms, core_attach);
      Molecule rgroup = detail::extract_fragment(m, rgroup_atoms, rgroup_attach);
      out.emplace(canonical_smiles(core), canonical_smiles(rgroup));
    }
  }
  return out;
}

std::multiset<std::pair<std::string, std::string>> cut_pairs(
    const std::vector<Fragmentation>& cuts) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& f : cuts)
    out.emplace(canonical_smiles(f.core), canonical_smiles(f.rgroup));
  return out;
}

}  // namespace

TEST(EnumerateCuts, EthanolBoundaryIsEmpty) {
  // Both cuts give rgroup ratios of 1/3 or 2/3; 1/3 is not < 0.33.
  EXPECT_TRUE(enumerate_cuts(parse_smiles("CCO"), {}).empty());
}

TEST(EnumerateCuts, BenzeneHasNoAcyclicBonds) {
  EXPECT_TRUE(enumerate_cuts(parse_smiles("c1ccccc1"), {}).empty());
}

TEST(EnumerateCuts, PhenethylAlcoholCuts) {
  Molecule m = parse_smiles("OCCc1ccccc1");
  auto cuts = enumerate_cuts(m, {});
  std::set<std::string> rgroups;
  for (const auto& f : cuts) rgroups.insert(canonical_smiles(f.rgroup));
  EXPECT_EQ(cuts.size(), 2u);
  EXPECT_TRUE(rgroups.count(canonical_smiles(parse_smiles("[*:1]O"))));
  EXPECT_TRUE(rgroups.count(canonical_smiles(parse_smiles("[*:1]CO"))));
  EXPECT_FALSE(rgroups.count(canonical_smiles(parse_smiles("[*:1]CCO"))));
}

TEST(EnumerateCuts, HeavyAtomSplitInvariant) {
  for (const char* s : {"OCCc1ccccc1", "CC(C)Cc1ccc(C(C)C(=O)O)cc1", "ClCCCCCCCCCC"}) {
    Molecule m = parse_smiles(s);
    for (const auto& f : enumerate_cuts(m, FragmentationConstraints::unbounded())) {
      EXPECT_EQ(heavy_atom_count(f.core) + heavy_atom_count(f.rgroup),
                heavy_atom_count(m));
      EXPECT_EQ(wildcard_count(f.core), 1);
      EXPECT_EQ(wildcard_count(f.rgroup), 1);
    }
  }
}

TEST(EnumerateCuts, MatchesBruteForceOracle) {
  const char* molecules[] = {
      "CCO",
      "OCCc1ccccc1",
      "CC(C)Cc1ccc(C(C)C(=O)O)cc1",
      "Oc1ccc(Cl)cc1",
      "CCN(CC)C(=O)c1ccccc1",
      "c1ccc2ccccc2c1",
      "CC(C)(C)OC(=O)N1CCC(O)CC1",
      "ClCCCCCCCCCC",
  };
  FragmentationConstraints defaults{};
  for (const char* s : molecules) {
    Molecule m = parse_smiles(s);
    EXPECT_EQ(cut_pairs(enumerate_cuts(m, defaults)), brute_force_cut_pairs(m, defaults))
        << s;
  }
}

TEST(EnumerateCuts, MonotoneUnderLooserConstraints) {
  Molecule m = parse_smiles("CC(C)Cc1ccc(C(C)C(=O)O)cc1");
  FragmentationConstraints tight{10, 4, 0.25};
  FragmentationConstraints loose{50, 13, 0.40};
  auto tight_set = cut_pairs(enumerate_cuts(m, tight));
  auto loose_set = cut_pairs(enumerate_cuts(m, loose));
  for (const auto& p : tight_set) EXPECT_TRUE(loose_set.count(p)) << p.first;
  EXPECT_GE(loose_set.size(), tight_set.size());
}

TEST(Reattach, PhenolFromParts) {
  Molecule joined =
      reattach(parse_smiles("[*:1]c1ccccc1"), parse_smiles("[*:1]O"));
  EXPECT_EQ(canonical_smiles(joined), canonical_smiles(parse_smiles("Oc1ccccc1")));
}

TEST(Reattach, InverseOfEnumerate) {
  for (const char* s :
       {"OCCc1ccccc1", "CC(C)Cc1ccc(C(C)C(=O)O)cc1", "CCN(CC)C(=O)c1ccccc1"}) {
    Molecule m = parse_smiles(s);
    std::string canon = canonical_smiles(m);
    for (const auto& f : enumerate_cuts(m, FragmentationConstraints::unbounded()))
      EXPECT_EQ(canonical_smiles(reattach(f.core, f.rgroup)), canon) << s;
  }
}

TEST(Reattach, ArityErrors) {
  EXPECT_THROW(reattach(parse_smiles("[*:1]C"), parse_smiles("[*:1][*:1]C")), ArityError);
  EXPECT_THROW(reattach(parse_smiles("CC"), parse_smiles("[*:1]O")), ArityError);
}

TEST(Reattach, ValenceError) {
  // An oxygen written with two hydrogens cannot take another bond.
  EXPECT_THROW(reattach(parse_smiles("[*:1]C"), parse_smiles("[*:1][OH2]")), ValenceError);
  // Same on the core side.
  EXPECT_THROW(reattach(parse_smiles("[*:1][CH4]"), parse_smiles("[*:1]O")), ValenceError);
}

TEST(Reattach, AromaticAttachment) {
  Molecule joined = reattach(parse_smiles("[*:1]n1cccc1"), parse_smiles("[*:1]C"));
  EXPECT_EQ(canonical_smiles(joined), canonical_smiles(parse_smiles("Cn1cccc1")));
}
