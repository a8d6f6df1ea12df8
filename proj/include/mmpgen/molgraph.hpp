// SMILES subset parser, molecular graph and canonical writer.
//
// Supported grammar: organic-subset bare atoms (B C N O P S F Cl Br I plus
// aromatic b c n o p s), bracket atoms with hydrogen count, charge in
// [-2,+2] and atom map, the wildcard attachment atom [*:n], ring closures
// 1-9 and %nn, branches, and the bond symbols - = # :. Stereochemistry,
// isotopes and dot-disconnected inputs are rejected as unsupported.
//
// Hydrogens are never graph atoms: bracket atoms carry their written H
// count, bare atoms get theirs from a fixed-valence model. Canonical forms
// come from iterative invariant refinement with backtracking over residual
// ties, so equality of molecules reduces to string comparison.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace mmpgen {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnsupportedFeature : public ParseError {
 public:
  using ParseError::ParseError;
};

class ValenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

struct Atom {
  std::string element;      // "C", "Cl", ... or "*" for the wildcard
  bool aromatic = false;
  int formal_charge = 0;
  int hcount = 0;           // total hydrogens on this atom
  bool explicit_h = false;  // hcount was written in a bracket
  int map_number = 0;       // 0 = unmapped
  bool is_wildcard = false;
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;  // computed: bond lies on a cycle

  int other(int atom) const { return atom == a ? b : a; }
};

namespace detail {

inline int default_valence(std::string_view el) {
  if (el == "C") return 4;
  if (el == "N" || el == "P" || el == "B") return 3;
  if (el == "O" || el == "S") return 2;
  if (el == "F" || el == "Cl" || el == "Br" || el == "I") return 1;
  return 0;
}

inline bool organic_subset(std::string_view el) {
  return el == "B" || el == "C" || el == "N" || el == "O" || el == "P" ||
         el == "S" || el == "F" || el == "Cl" || el == "Br" || el == "I";
}

inline bool aromatic_capable(std::string_view el) {
  return el == "B" || el == "C" || el == "N" || el == "O" || el == "P" || el == "S";
}

// Valence after charge adjustment: cations of the N/O families gain their
// charge, anions of any element lose it.
inline int adjusted_valence(const Atom& a) {
  int v = default_valence(a.element);
  if (a.formal_charge > 0 &&
      (a.element == "N" || a.element == "P" || a.element == "O" || a.element == "S"))
    v += a.formal_charge;
  else if (a.formal_charge < 0)
    v += a.formal_charge;
  return v;
}

// One shared pi slot per aromatic atom, except for pyrrole-type N/P (three
// sigma partners counting hydrogens) and for O/S, whose ring contribution is
// a lone pair.
inline int aromatic_pi_slot(std::string_view el, int sigma_plus_h) {
  if (el == "N" || el == "P") return sigma_plus_h <= 2 ? 1 : 0;
  if (el == "O" || el == "S") return 0;
  return 1;  // B, C
}

}  // namespace detail

class Molecule {
 public:
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  struct Neighbor {
    int atom;
    int bond;
  };

  const std::vector<Neighbor>& neighbors(int atom) const { return adj_[atom]; }
  int atom_count() const { return static_cast<int>(atoms.size()); }
  int bond_count() const { return static_cast<int>(bonds.size()); }

  // Sum of sigma bond orders at an atom; aromatic bonds count one.
  int sigma_order_sum(int atom) const {
    int s = 0;
    for (const auto& nb : adj_[atom]) {
      BondOrder o = bonds[nb.bond].order;
      s += o == BondOrder::Aromatic ? 1 : static_cast<int>(o);
    }
    return s;
  }

  // Rebuild adjacency and ring membership after atoms/bonds change.
  void finalize() {
    adj_.assign(atoms.size(), {});
    for (int i = 0; i < bond_count(); ++i) {
      bonds[i].in_ring = false;
      adj_[bonds[i].a].push_back({bonds[i].b, i});
      adj_[bonds[i].b].push_back({bonds[i].a, i});
    }
    mark_ring_bonds();
  }

  bool connected() const {
    if (atoms.empty()) return false;
    std::vector<char> seen(atoms.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (const auto& nb : adj_[a]) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = 1;
          ++count;
          stack.push_back(nb.atom);
        }
      }
    }
    return count == atom_count();
  }

 private:
  // Iterative bridge finding; a bond is in a ring iff it is not a bridge.
  void mark_ring_bonds() {
    int n = atom_count();
    std::vector<int> disc(n, -1), low(n, 0);
    int timer = 0;
    struct Frame {
      int atom;
      int parent_bond;
      std::size_t next;
    };
    for (int root = 0; root < n; ++root) {
      if (disc[root] != -1) continue;
      std::vector<Frame> stack{{root, -1, 0}};
      disc[root] = low[root] = timer++;
      while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < adj_[f.atom].size()) {
          const Neighbor nb = adj_[f.atom][f.next++];
          if (nb.bond == f.parent_bond) continue;
          if (disc[nb.atom] == -1) {
            disc[nb.atom] = low[nb.atom] = timer++;
            stack.push_back({nb.atom, nb.bond, 0});
          } else {
            low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
            bonds[nb.bond].in_ring = true;
          }
        } else {
          const int atom = f.atom;
          const int parent_bond = f.parent_bond;
          stack.pop_back();
          if (!stack.empty()) {
            Frame& p = stack.back();
            low[p.atom] = std::min(low[p.atom], low[atom]);
            if (low[atom] <= disc[p.atom]) bonds[parent_bond].in_ring = true;
          }
        }
      }
    }
  }

  std::vector<std::vector<Neighbor>> adj_;
};

inline int heavy_atom_count(const Molecule& m) {
  int n = 0;
  for (const auto& a : m.atoms)
    if (!a.is_wildcard) ++n;
  return n;
}

inline int wildcard_count(const Molecule& m) {
  int n = 0;
  for (const auto& a : m.atoms)
    if (a.is_wildcard) ++n;
  return n;
}

namespace detail {

class SmilesParser {
 public:
  explicit SmilesParser(std::string_view text) : s_(text) {}

  Molecule run() {
    if (s_.empty()) throw SyntaxError("empty SMILES", 0);
    while (i_ < s_.size()) step();
    if (!open_branches_.empty())
      throw SyntaxError("unbalanced '('", open_branches_.back());
    if (pending_bond_ != 0)
      throw SyntaxError("dangling bond symbol", pending_bond_pos_);
    if (!ring_.empty())
      throw SyntaxError("dangling ring closure", ring_.begin()->second.pos);
    if (mol_.atoms.empty()) throw SyntaxError("no atoms", 0);
    assign_bare_hydrogens();
    mol_.finalize();
    return std::move(mol_);
  }

 private:
  struct RingSlot {
    int atom;
    char bond;
    std::size_t pos;
  };

  void step() {
    char c = s_[i_];
    switch (c) {
      case ' ':
      case '\t':
      case '\r':
      case '\n':
        throw SyntaxError("whitespace inside SMILES", i_);
      case '.':
        throw UnsupportedFeature("disconnected components are not supported", i_);
      case '/':
      case '\\':
        throw UnsupportedFeature("stereo bond marks are not supported", i_);
      case '@':
        throw UnsupportedFeature("chirality is not supported", i_);
      case '(':
        if (prev_ < 0) throw SyntaxError("branch before any atom", i_);
        if (pending_bond_ != 0)
          throw SyntaxError("bond symbol before '('", pending_bond_pos_);
        stack_.push_back(prev_);
        open_branches_.push_back(i_);
        atoms_at_branch_.push_back(mol_.atom_count());
        ++i_;
        break;
      case ')':
        if (stack_.empty()) throw SyntaxError("unbalanced ')'", i_);
        if (pending_bond_ != 0)
          throw SyntaxError("bond symbol before ')'", pending_bond_pos_);
        if (mol_.atom_count() == atoms_at_branch_.back())
          throw SyntaxError("empty branch", i_);
        prev_ = stack_.back();
        stack_.pop_back();
        open_branches_.pop_back();
        atoms_at_branch_.pop_back();
        ++i_;
        break;
      case '-':
      case '=':
      case '#':
      case ':':
        if (pending_bond_ != 0)
          throw SyntaxError("two consecutive bond symbols", i_);
        if (prev_ < 0) throw SyntaxError("bond before any atom", i_);
        pending_bond_ = c;
        pending_bond_pos_ = i_;
        ++i_;
        break;
      case '%': {
        if (i_ + 2 >= s_.size() || !is_digit(s_[i_ + 1]) || !is_digit(s_[i_ + 2]))
          throw SyntaxError("'%' needs two digits", i_);
        int num = (s_[i_ + 1] - '0') * 10 + (s_[i_ + 2] - '0');
        ring_closure(num, i_);
        i_ += 3;
        break;
      }
      case '[':
        bracket_atom();
        break;
      default:
        if (is_digit(c)) {
          ring_closure(c - '0', i_);
          ++i_;
        } else {
          bare_atom();
        }
        break;
    }
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void ring_closure(int num, std::size_t pos) {
    if (prev_ < 0) throw SyntaxError("ring closure before any atom", pos);
    auto it = ring_.find(num);
    if (it == ring_.end()) {
      ring_[num] = {prev_, pending_bond_, pos};
      pending_bond_ = 0;
      return;
    }
    RingSlot slot = it->second;
    ring_.erase(it);
    if (slot.atom == prev_) throw SyntaxError("ring closure to the same atom", pos);
    char symbol = 0;
    if (slot.bond != 0 && pending_bond_ != 0 && slot.bond != pending_bond_)
      throw SyntaxError("conflicting ring closure bond symbols", pos);
    symbol = slot.bond != 0 ? slot.bond : pending_bond_;
    pending_bond_ = 0;
    add_bond(slot.atom, prev_, symbol, pos);
  }

  void add_bond(int a, int b, char symbol, std::size_t pos) {
    for (const auto& bd : mol_.bonds) {
      if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
        throw SyntaxError("duplicate bond between atoms", pos);
    }
    BondOrder order;
    bool both_aromatic = mol_.atoms[a].aromatic && mol_.atoms[b].aromatic;
    switch (symbol) {
      case 0:
        order = both_aromatic ? BondOrder::Aromatic : BondOrder::Single;
        break;
      case '-':
        order = BondOrder::Single;
        break;
      case '=':
        order = BondOrder::Double;
        break;
      case '#':
        order = BondOrder::Triple;
        break;
      case ':':
        if (!both_aromatic)
          throw SyntaxError("aromatic bond between non-aromatic atoms", pos);
        order = BondOrder::Aromatic;
        break;
      default:
        throw SyntaxError("bad bond symbol", pos);
    }
    mol_.bonds.push_back({a, b, order, false});
  }

  int push_atom(Atom atom, std::size_t pos) {
    mol_.atoms.push_back(std::move(atom));
    atom_pos_.push_back(pos);
    int idx = mol_.atom_count() - 1;
    if (prev_ >= 0) {
      char symbol = pending_bond_;
      pending_bond_ = 0;
      add_bond(prev_, idx, symbol, pos);
    }
    prev_ = idx;
    return idx;
  }

  void bare_atom() {
    std::size_t pos = i_;
    Atom a;
    if (i_ + 1 < s_.size() &&
        ((s_[i_] == 'C' && s_[i_ + 1] == 'l') || (s_[i_] == 'B' && s_[i_ + 1] == 'r'))) {
      a.element = s_.substr(i_, 2);
      i_ += 2;
    } else {
      char c = s_[i_];
      switch (c) {
        case 'B': case 'C': case 'N': case 'O': case 'P': case 'S':
        case 'F': case 'I':
          a.element = std::string(1, c);
          break;
        case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
          a.element = std::string(1, static_cast<char>(c - 'a' + 'A'));
          a.aromatic = true;
          break;
        default:
          throw SyntaxError("unknown element", i_);
      }
      ++i_;
    }
    push_atom(std::move(a), pos);
  }

  void bracket_atom() {
    std::size_t start = i_;
    ++i_;  // past '['
    if (at_end()) throw SyntaxError("unterminated bracket atom", start);
    if (is_digit(s_[i_]))
      throw UnsupportedFeature("isotopes are not supported", i_);
    Atom a;
    if (s_[i_] == '*') {
      a.element = "*";
      a.is_wildcard = true;
      ++i_;
    } else if (s_[i_] >= 'A' && s_[i_] <= 'Z') {
      if (i_ + 1 < s_.size() && s_[i_ + 1] >= 'a' && s_[i_ + 1] <= 'z' &&
          (s_.substr(i_, 2) == "Cl" || s_.substr(i_, 2) == "Br")) {
        a.element = s_.substr(i_, 2);
        i_ += 2;
      } else {
        a.element = std::string(1, s_[i_]);
        if (!detail::organic_subset(a.element))
          throw SyntaxError("unknown element", i_);
        ++i_;
      }
    } else if (s_[i_] >= 'a' && s_[i_] <= 'z') {
      char up = static_cast<char>(s_[i_] - 'a' + 'A');
      a.element = std::string(1, up);
      if (!detail::aromatic_capable(a.element))
        throw SyntaxError("unknown aromatic element", i_);
      a.aromatic = true;
      ++i_;
    } else {
      throw SyntaxError("expected element symbol", i_);
    }

    if (!at_end() && s_[i_] == '@')
      throw UnsupportedFeature("chirality is not supported", i_);

    if (!at_end() && s_[i_] == 'H') {
      ++i_;
      int h = 1;
      if (!at_end() && is_digit(s_[i_])) {
        h = 0;
        while (!at_end() && is_digit(s_[i_])) h = h * 10 + (s_[i_++] - '0');
      }
      if (a.is_wildcard)
        throw SyntaxError("hydrogen count on wildcard atom", i_);
      a.hcount = h;
      a.explicit_h = true;
    } else {
      a.hcount = 0;
      a.explicit_h = !a.is_wildcard;  // bracket atom without H spec has zero H
    }

    if (!at_end() && (s_[i_] == '+' || s_[i_] == '-')) {
      char sign = s_[i_];
      std::size_t cpos = i_;
      ++i_;
      int mag = 1;
      if (!at_end() && is_digit(s_[i_])) {
        mag = s_[i_] - '0';
        ++i_;
      } else {
        while (!at_end() && s_[i_] == sign) {
          ++mag;
          ++i_;
        }
      }
      if (a.is_wildcard) throw SyntaxError("charge on wildcard atom", cpos);
      a.formal_charge = sign == '+' ? mag : -mag;
      if (a.formal_charge < -2 || a.formal_charge > 2)
        throw SyntaxError("formal charge out of range [-2, 2]", cpos);
    }

    if (!at_end() && s_[i_] == ':') {
      ++i_;
      if (at_end() || !is_digit(s_[i_]))
        throw SyntaxError("expected map number after ':'", i_);
      int map = 0;
      while (!at_end() && is_digit(s_[i_])) map = map * 10 + (s_[i_++] - '0');
      a.map_number = map;
    }

    if (at_end() || s_[i_] != ']')
      throw SyntaxError("expected ']'", at_end() ? s_.size() : i_);
    ++i_;
    if (a.is_wildcard && a.map_number < 1)
      throw SyntaxError("wildcard atom requires a map number", start);
    push_atom(std::move(a), start);
  }

  bool at_end() const { return i_ >= s_.size(); }

  void assign_bare_hydrogens() {
    // Needs complete bonds, so it runs after parsing. adj_ is not built yet;
    // accumulate sigma sums directly from the bond table.
    std::vector<int> sigma(mol_.atom_count(), 0);
    for (const auto& b : mol_.bonds) {
      int o = b.order == BondOrder::Aromatic ? 1 : static_cast<int>(b.order);
      sigma[b.a] += o;
      sigma[b.b] += o;
    }
    for (int i = 0; i < mol_.atom_count(); ++i) {
      Atom& a = mol_.atoms[i];
      if (a.explicit_h || a.is_wildcard) continue;
      int v = detail::adjusted_valence(a);
      int slot = a.aromatic ? detail::aromatic_pi_slot(a.element, sigma[i]) : 0;
      int h = v - sigma[i] - slot;
      if (h < 0)
        throw SyntaxError("valence exceeded on atom '" + a.element + "'",
                          atom_pos_[i]);
      a.hcount = h;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  Molecule mol_;
  std::vector<std::size_t> atom_pos_;
  std::vector<int> stack_;
  std::vector<std::size_t> open_branches_;
  std::vector<int> atoms_at_branch_;
  int prev_ = -1;
  char pending_bond_ = 0;
  std::size_t pending_bond_pos_ = 0;
  std::map<int, RingSlot> ring_;
};

}  // namespace detail

inline Molecule parse_smiles(std::string_view text) {
  return detail::SmilesParser(text).run();
}

namespace detail {

// Hydrogen count a bare (unbracketed) atom token would receive in this bond
// environment; -1 when no bare form exists.
inline int bare_form_hcount(const Atom& a, int sigma_sum) {
  if (a.is_wildcard || a.formal_charge != 0 || a.map_number != 0) return -1;
  if (!organic_subset(a.element)) return -1;
  if (a.aromatic && !aromatic_capable(a.element)) return -1;
  int v = adjusted_valence(a);
  int slot = a.aromatic ? aromatic_pi_slot(a.element, sigma_sum) : 0;
  int h = v - sigma_sum - slot;
  return h < 0 ? -1 : h;
}

inline std::string atom_token(const Molecule& m, int idx) {
  const Atom& a = m.atoms[idx];
  if (a.is_wildcard) return "[*:" + std::to_string(a.map_number) + "]";
  std::string sym = a.element;
  if (a.aromatic) sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
  if (bare_form_hcount(a, m.sigma_order_sum(idx)) == a.hcount) return sym;
  std::string t = "[" + sym;
  if (a.hcount == 1)
    t += "H";
  else if (a.hcount > 1)
    t += "H" + std::to_string(a.hcount);
  if (a.formal_charge != 0) {
    t += a.formal_charge > 0 ? '+' : '-';
    int mag = std::abs(a.formal_charge);
    if (mag > 1) t += std::to_string(mag);
  }
  if (a.map_number != 0) t += ":" + std::to_string(a.map_number);
  t += "]";
  return t;
}

inline const char* bond_token(const Molecule& m, const Bond& b) {
  switch (b.order) {
    case BondOrder::Double:
      return "=";
    case BondOrder::Triple:
      return "#";
    case BondOrder::Aromatic:
      return "";
    case BondOrder::Single:
      return m.atoms[b.a].aromatic && m.atoms[b.b].aromatic ? "-" : "";
  }
  return "";
}

// Emit SMILES following a total atom order: DFS from the order-minimal atom,
// children visited in order, non-tree edges become ring closures.
inline std::string emit_smiles(const Molecule& m, const std::vector<int>& order) {
  int n = m.atom_count();
  int root = 0;
  for (int i = 1; i < n; ++i)
    if (order[i] < order[root]) root = i;

  // Pass 1: preorder, tree children, ring bonds.
  std::vector<int> preorder_index(n, -1);
  std::vector<std::vector<int>> children(n);       // tree child atoms
  std::vector<int> child_bond(n, -1);              // bond to parent
  std::vector<std::vector<int>> ring_bonds_at(n);  // ring bond ids per atom
  std::vector<char> bond_used(m.bond_count(), 0);
  {
    struct Frame {
      int atom;
      std::vector<int> nbrs;
      std::size_t next = 0;
    };
    auto sorted_neighbors = [&](int atom) {
      std::vector<int> nb;
      for (const auto& x : m.neighbors(atom)) nb.push_back(x.atom);
      std::sort(nb.begin(), nb.end(),
                [&](int x, int y) { return order[x] < order[y]; });
      return nb;
    };
    int counter = 0;
    std::vector<Frame> stack;
    stack.push_back({root, sorted_neighbors(root)});
    preorder_index[root] = counter++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.nbrs.size()) {
        stack.pop_back();
        continue;
      }
      int nbr = f.nbrs[f.next++];
      int bond = -1;
      for (const auto& x : m.neighbors(f.atom))
        if (x.atom == nbr) bond = x.bond;
      if (bond_used[bond]) continue;
      bond_used[bond] = 1;
      if (preorder_index[nbr] == -1) {
        preorder_index[nbr] = counter++;
        children[f.atom].push_back(nbr);
        child_bond[nbr] = bond;
        stack.push_back({nbr, sorted_neighbors(nbr)});
      } else {
        ring_bonds_at[f.atom].push_back(bond);
        ring_bonds_at[nbr].push_back(bond);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    std::sort(ring_bonds_at[i].begin(), ring_bonds_at[i].end(), [&](int x, int y) {
      int px = preorder_index[m.bonds[x].other(i)];
      int py = preorder_index[m.bonds[y].other(i)];
      return px < py;
    });
  }

  // Pass 2: emit in the same traversal, allocating ring digits on first
  // sight and freeing them at closure.
  std::map<int, int> open_digit;  // bond id -> digit
  std::vector<char> digit_in_use(100, 0);
  std::string out;
  auto ring_digit_text = [&](int bond, int at_atom) {
    std::string t;
    auto it = open_digit.find(bond);
    if (it == open_digit.end()) {
      int d = 1;
      while (d < 100 && digit_in_use[d]) ++d;
      if (d == 100) throw std::runtime_error("ring closure digits exhausted");
      digit_in_use[d] = 1;
      open_digit[bond] = d;
      t += bond_token(m, m.bonds[bond]);
      t += d < 10 ? std::to_string(d) : "%" + std::to_string(d);
    } else {
      int d = it->second;
      digit_in_use[d] = 0;
      open_digit.erase(it);
      t += d < 10 ? std::to_string(d) : "%" + std::to_string(d);
    }
    (void)at_atom;
    return t;
  };

  struct EmitFrame {
    int atom;
    std::size_t next_child = 0;
  };
  std::vector<EmitFrame> stack;
  auto emit_atom = [&](int atom) {
    out += atom_token(m, atom);
    for (int rb : ring_bonds_at[atom]) out += ring_digit_text(rb, atom);
  };
  emit_atom(root);
  stack.push_back({root});
  while (!stack.empty()) {
    EmitFrame& f = stack.back();
    const auto& kids = children[f.atom];
    if (f.next_child >= kids.size()) {
      stack.pop_back();
      if (!stack.empty()) {
        EmitFrame& p = stack.back();
        if (p.next_child < children[p.atom].size()) out += ')';
      }
      continue;
    }
    bool last = f.next_child + 1 == kids.size();
    int kid = kids[f.next_child++];
    if (!last) out += '(';
    out += bond_token(m, m.bonds[child_bond[kid]]);
    emit_atom(kid);
    stack.push_back({kid});
  }
  return out;
}

}  // namespace detail

// Serialize in input atom order; the output re-parses to an isomorphic graph.
inline std::string write_smiles(const Molecule& m) {
  std::vector<int> order(m.atom_count());
  for (int i = 0; i < m.atom_count(); ++i) order[i] = i;
  return detail::emit_smiles(m, order);
}

namespace detail {

inline void densify_ranks(std::vector<long long>& key, std::vector<int>& rank) {
  std::vector<long long> sorted = key;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t i = 0; i < key.size(); ++i) {
    rank[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), key[i]) - sorted.begin());
  }
}

inline std::vector<int> initial_ranks(const Molecule& m) {
  int n = m.atom_count();
  using Key = std::tuple<int, std::string, int, int, int, int, int>;
  std::vector<Key> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom& a = m.atoms[i];
    keys[i] = {a.is_wildcard ? 0 : 1,
               a.element,
               a.aromatic ? 1 : 0,
               a.formal_charge,
               a.hcount,
               static_cast<int>(m.neighbors(i).size()),
               a.map_number};
  }
  std::vector<Key> sorted = keys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) {
    rank[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
  }
  return rank;
}

// Morgan-style equitable refinement: extend each rank by the sorted multiset
// of (bond order, neighbor rank) until the partition stops changing.
inline void refine_ranks(const Molecule& m, std::vector<int>& rank) {
  int n = m.atom_count();
  using Key = std::pair<int, std::vector<std::pair<int, int>>>;
  for (;;) {
    std::vector<Key> keys(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, int>> nb;
      for (const auto& x : m.neighbors(i))
        nb.emplace_back(static_cast<int>(m.bonds[x.bond].order), rank[x.atom]);
      std::sort(nb.begin(), nb.end());
      keys[i] = {rank[i], std::move(nb)};
    }
    std::vector<Key> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      next[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
    }
    if (next == rank) return;
    rank = std::move(next);
  }
}

inline std::string canonical_emit(const Molecule& m, std::vector<int> rank) {
  int n = m.atom_count();
  // Find the lowest-rank class with a tie.
  std::vector<int> count(n, 0);
  for (int r : rank) ++count[r];
  int tied_rank = -1;
  for (int r = 0; r < n; ++r) {
    if (count[r] > 1) {
      tied_rank = r;
      break;
    }
  }
  if (tied_rank == -1) return emit_smiles(m, rank);

  std::string best;
  for (int a = 0; a < n; ++a) {
    if (rank[a] != tied_rank) continue;
    std::vector<long long> key(n);
    for (int i = 0; i < n; ++i) key[i] = 2LL * rank[i] + 1;
    key[a] -= 1;  // individualize: a precedes the rest of its class
    std::vector<int> next(n);
    densify_ranks(key, next);
    refine_ranks(m, next);
    std::string s = canonical_emit(m, std::move(next));
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

}  // namespace detail

// Deterministic canonical form: identical for all isomorphic inputs with the
// same atom attributes, bond orders and map numbers.
inline std::string canonical_smiles(const Molecule& m) {
  std::vector<int> rank = detail::initial_ranks(m);
  detail::refine_ranks(m, rank);
  return detail::canonical_emit(m, std::move(rank));
}

// Relabel atoms: new atom i is old atom perm[i].
inline Molecule apply_atom_permutation(const Molecule& m, const std::vector<int>& perm) {
  Molecule out;
  int n = m.atom_count();
  std::vector<int> inverse(n);
  for (int i = 0; i < n; ++i) inverse[perm[i]] = i;
  out.atoms.reserve(n);
  for (int i = 0; i < n; ++i) out.atoms.push_back(m.atoms[perm[i]]);
  out.bonds.reserve(m.bond_count());
  for (const auto& b : m.bonds)
    out.bonds.push_back({inverse[b.a], inverse[b.b], b.order, false});
  out.finalize();
  return out;
}

// --- corpus file reading -------------------------------------------------
//
// One record per line: `<smiles>` or `<smiles><TAB><id>`. Lines starting
// with '#' are ignored; IDs default to the 1-based line number.

struct CorpusRecord {
  std::string id;
  std::string smiles;
  Molecule mol;
};

struct CorpusIssue {
  std::size_t line;
  std::string message;
};

struct CorpusReadResult {
  std::vector<CorpusRecord> records;
  std::vector<CorpusIssue> issues;
};

inline CorpusReadResult read_corpus(std::istream& in) {
  CorpusReadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::string smiles = line;
    std::string id;
    auto tab = line.find('\t');
    if (tab != std::string::npos) {
      smiles = line.substr(0, tab);
      id = line.substr(tab + 1);
    }
    if (id.empty()) id = std::to_string(line_no);
    try {
      Molecule mol = parse_smiles(smiles);
      if (wildcard_count(mol) > 0) {
        out.issues.push_back({line_no, "wildcard atom in corpus molecule"});
        continue;
      }
      out.records.push_back({std::move(id), std::move(smiles), std::move(mol)});
    } catch (const ParseError& e) {
      out.issues.push_back({line_no, e.what()});
    }
  }
  return out;
}

}  // namespace mmpgen
