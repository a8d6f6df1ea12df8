// Single-cut fragmentation: enumerate the acyclic single bonds of a
// molecule, split at each into a (core, rgroup) pair carrying one [*:1]
// attachment atom per side, and filter by the mining size constraints.
// reattach() is the exact inverse and is what the rule applier builds
// products with.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mmpgen/molgraph.hpp"

namespace mmpgen {

struct FragmentationConstraints {
  int max_core_heavy = 50;
  int max_rgroup_heavy = 13;
  double max_rgroup_ratio = 0.33;  // strict upper bound

  static FragmentationConstraints unbounded() {
    return {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), 1.0};
  }
};

struct Fragmentation {
  Molecule core;    // one [*:1] wildcard
  Molecule rgroup;  // one [*:1] wildcard
  int cut_bond;     // bond index in the parent molecule
};

namespace detail {

// Atoms reachable from `start` without crossing `blocked_bond`.
inline std::vector<int> component_atoms(const Molecule& m, int start, int blocked_bond) {
  std::vector<char> seen(m.atom_count(), 0);
  std::vector<int> stack{start}, out;
  seen[start] = 1;
  while (!stack.empty()) {
    int a = stack.back();
    stack.pop_back();
    out.push_back(a);
    for (const auto& nb : m.neighbors(a)) {
      if (nb.bond == blocked_bond || seen[nb.atom]) continue;
      seen[nb.atom] = 1;
      stack.push_back(nb.atom);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Copy a component into a fragment molecule, bonding a fresh [*:1] wildcard
// to the former cut atom.
inline Molecule extract_fragment(const Molecule& m, const std::vector<int>& atoms,
                                 int attach_atom) {
  Molecule frag;
  std::vector<int> local(m.atom_count(), -1);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    local[atoms[i]] = static_cast<int>(i);
    frag.atoms.push_back(m.atoms[atoms[i]]);
  }
  for (const auto& b : m.bonds) {
    if (local[b.a] >= 0 && local[b.b] >= 0)
      frag.bonds.push_back({local[b.a], local[b.b], b.order, false});
  }
  Atom wildcard;
  wildcard.element = "*";
  wildcard.is_wildcard = true;
  wildcard.map_number = 1;
  frag.atoms.push_back(wildcard);
  frag.bonds.push_back(
      {local[attach_atom], frag.atom_count() - 1, BondOrder::Single, false});
  frag.finalize();
  return frag;
}

// Capacity check when an atom gains sigma bonds: written H counts are kept,
// bare-parsed counts were valence-derived, both must still fit.
inline bool sigma_capacity_ok(const Atom& a, int sigma_sum) {
  int v = adjusted_valence(a);
  int slot = a.aromatic ? aromatic_pi_slot(a.element, sigma_sum + a.hcount) : 0;
  return sigma_sum + slot + a.hcount <= v;
}

}  // namespace detail

// All constraint-passing single-cut fragmentations, ordered by cut bond
// index, core side first (orientation 0: the bond's first endpoint side is
// the core), rgroup side second.
inline std::vector<Fragmentation> enumerate_cuts(const Molecule& mol,
                                                 const FragmentationConstraints& c) {
  std::vector<Fragmentation> out;
  int parent_heavy = heavy_atom_count(mol);
  for (int bi = 0; bi < mol.bond_count(); ++bi) {
    const Bond& b = mol.bonds[bi];
    if (b.order != BondOrder::Single || b.in_ring) continue;
    if (mol.atoms[b.a].is_wildcard || mol.atoms[b.b].is_wildcard) continue;
    std::vector<int> side_a = detail::component_atoms(mol, b.a, bi);
    std::vector<int> side_b = detail::component_atoms(mol, b.b, bi);
    for (int orientation = 0; orientation < 2; ++orientation) {
      const auto& core_atoms = orientation == 0 ? side_a : side_b;
      const auto& rgroup_atoms = orientation == 0 ? side_b : side_a;
      int core_attach = orientation == 0 ? b.a : b.b;
      int rgroup_attach = orientation == 0 ? b.b : b.a;
      int core_heavy = static_cast<int>(core_atoms.size());
      int rgroup_heavy = static_cast<int>(rgroup_atoms.size());
      if (core_heavy > c.max_core_heavy) continue;
      if (rgroup_heavy > c.max_rgroup_heavy) continue;
      if (!(static_cast<double>(rgroup_heavy) / parent_heavy < c.max_rgroup_ratio))
        continue;
      out.push_back({detail::extract_fragment(mol, core_atoms, core_attach),
                     detail::extract_fragment(mol, rgroup_atoms, rgroup_attach), bi});
    }
  }
  return out;
}

// Join two fragments at their wildcards with a single bond.
inline Molecule reattach(const Molecule& core, const Molecule& rgroup) {
  if (wildcard_count(core) != 1)
    throw ArityError("core must contain exactly one wildcard, got " +
                     std::to_string(wildcard_count(core)));
  if (wildcard_count(rgroup) != 1)
    throw ArityError("rgroup must contain exactly one wildcard, got " +
                     std::to_string(wildcard_count(rgroup)));

  auto wildcard_index = [](const Molecule& m) {
    for (int i = 0; i < m.atom_count(); ++i)
      if (m.atoms[i].is_wildcard) return i;
    return -1;
  };
  auto attach_neighbor = [](const Molecule& m, int w) {
    const auto& nbs = m.neighbors(w);
    if (nbs.size() != 1)
      throw ArityError("wildcard atom must have exactly one neighbor");
    return nbs[0].atom;
  };

  int core_w = wildcard_index(core);
  int rgroup_w = wildcard_index(rgroup);
  int core_attach = attach_neighbor(core, core_w);
  int rgroup_attach = attach_neighbor(rgroup, rgroup_w);

  Molecule out;
  std::vector<int> core_map(core.atom_count(), -1);
  std::vector<int> rgroup_map(rgroup.atom_count(), -1);
  for (int i = 0; i < core.atom_count(); ++i) {
    if (i == core_w) continue;
    core_map[i] = out.atom_count();
    out.atoms.push_back(core.atoms[i]);
  }
  for (int i = 0; i < rgroup.atom_count(); ++i) {
    if (i == rgroup_w) continue;
    rgroup_map[i] = out.atom_count();
    out.atoms.push_back(rgroup.atoms[i]);
  }
  for (const auto& b : core.bonds) {
    if (b.a == core_w || b.b == core_w) continue;
    out.bonds.push_back({core_map[b.a], core_map[b.b], b.order, false});
  }
  for (const auto& b : rgroup.bonds) {
    if (b.a == rgroup_w || b.b == rgroup_w) continue;
    out.bonds.push_back({rgroup_map[b.a], rgroup_map[b.b], b.order, false});
  }
  out.bonds.push_back(
      {core_map[core_attach], rgroup_map[rgroup_attach], BondOrder::Single, false});
  out.finalize();

  for (int joined : {core_map[core_attach], rgroup_map[rgroup_attach]}) {
    if (!detail::sigma_capacity_ok(out.atoms[joined], out.sigma_order_sum(joined)))
      throw ValenceError("valence exceeded on joined atom '" +
                         out.atoms[joined].element + "'");
  }
  return out;
}

}  // namespace mmpgen
