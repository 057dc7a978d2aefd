#include "tca/condition.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <utility>

#include "tca/error.hpp"
#include "tca/parallel.hpp"

namespace tca {

namespace {

// ---------------------------------------------------------------- parsing

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& labels, std::size_t h)
      : s_(text), labels_(labels), h_(h) {}

  Expr run() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError(pos_, "empty condition");
    Expr e = parse_or();
    skip_ws();
    if (pos_ != s_.size()) {
      throw ParseError(pos_, std::string("unexpected '") + s_[pos_] + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_or() {
    std::vector<Expr> args{parse_and()};
    while (accept('|')) args.push_back(parse_and());
    return args.size() == 1 ? std::move(args.front()) : Expr::any_of(std::move(args));
  }

  Expr parse_and() {
    std::vector<Expr> args{parse_unary()};
    while (accept('&')) args.push_back(parse_unary());
    return args.size() == 1 ? std::move(args.front()) : Expr::all_of(std::move(args));
  }

  Expr parse_unary() {
    if (accept('!')) return Expr::negate(parse_unary());
    return parse_atom();
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError(pos_, "unexpected end of condition");
    if (s_[pos_] == '(') {
      const std::size_t open = pos_++;
      Expr e = parse_or();
      if (!accept(')')) {
        throw ParseError(pos_, "missing ')' for '(' at position " + std::to_string(open));
      }
      return e;
    }
    if (!ident_start(s_[pos_])) {
      throw ParseError(pos_, std::string("expected a variable or '(' but found '") + s_[pos_] +
                                 "'");
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return resolve(s_.substr(start, pos_ - start), start);
  }

  Expr resolve(std::string_view tok, std::size_t at) const {
    const std::size_t k = labels_.size();
    const std::size_t n = (h_ + 1) * k;
    if (tok == "true") return Expr::truth();
    if (tok == "false") return Expr::falsity();
    if (tok.size() > 1 && tok.front() == 'x' && all_digits(tok.substr(1))) {
      std::size_t m = 0;
      const auto digits = tok.substr(1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), m);
      if (res.ec != std::errc() || m == 0 || m > n) {
        throw Error(ErrorCode::HorizonOutOfRange,
                    "at position " + std::to_string(at) + ": system index " + std::string(tok) +
                        " outside x1..x" + std::to_string(n));
      }
      return Expr::var(m - 1);
    }
    const std::size_t us = tok.rfind('_');
    if (us == std::string_view::npos || us == 0 || !all_digits(tok.substr(us + 1))) {
      throw ParseError(at, "expected 'name_t' or 'x<m>', got '" + std::string(tok) + "'");
    }
    const std::string_view name = tok.substr(0, us);
    const auto it = std::find(labels_.begin(), labels_.end(), name);
    if (it == labels_.end()) {
      throw Error(ErrorCode::UnknownVariable, "at position " + std::to_string(at) +
                                                  ": unknown variable '" + std::string(name) + "'");
    }
    std::size_t t = 0;
    const auto digits = tok.substr(us + 1);
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (res.ec != std::errc() || t > h_) {
      throw Error(ErrorCode::HorizonOutOfRange,
                  "at position " + std::to_string(at) + ": horizon " + std::string(digits) +
                      " of '" + std::string(name) + "' exceeds h = " + std::to_string(h_));
    }
    return Expr::var(t * k + static_cast<std::size_t>(it - labels_.begin()));
  }

  std::string_view s_;
  const std::vector<std::string>& labels_;
  std::size_t h_;
  std::size_t pos_ = 0;
};

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::True: out += "true"; return;
    case Expr::Kind::False: out += "false"; return;
    case Expr::Kind::Var: out += "x" + std::to_string(e.index + 1); return;
    case Expr::Kind::Not: {
      out += '!';
      const Expr& c = e.args.front();
      const bool wrap = c.kind == Expr::Kind::And || c.kind == Expr::Kind::Or;
      if (wrap) out += '(';
      print(c, out);
      if (wrap) out += ')';
      return;
    }
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const bool is_and = e.kind == Expr::Kind::And;
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out += is_and ? " & " : " | ";
        const Expr& c = e.args[i];
        const bool wrap = c.kind == Expr::Kind::Or || (is_and && c.kind == Expr::Kind::And);
        if (wrap) out += '(';
        print(c, out);
        if (wrap) out += ')';
      }
      return;
    }
  }
}

// ---------------------------------------------------------------- terms

using Key = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;
using TermMap = std::map<Key, std::int64_t>;

void check_cap(std::size_t count, std::size_t cap) {
  if (count > cap) {
    throw Error(ErrorCode::TermExplosion, "condition expands to more than " +
                                              std::to_string(cap) + " conjunction terms");
  }
}

void add_term(TermMap& m, Key key, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = m.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) m.erase(it);
  }
}

std::vector<std::size_t> set_union(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool intersects(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return true;
  }
  return false;
}

// Conjunction of two terms; false when the result is contradictory.
bool conjoin(const Key& a, const Key& b, Key& out) {
  out.first = set_union(a.first, b.first);
  out.second = set_union(a.second, b.second);
  return !intersects(out.first, out.second);
}

TermMap top() {
  TermMap m;
  m.emplace(Key{}, 1);
  return m;
}

TermMap product(const TermMap& a, const TermMap& b, std::size_t cap) {
  check_cap(a.size() * b.size() / 4, cap);
  TermMap out;
  Key k;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b)
      if (conjoin(ka, kb, k)) add_term(out, k, ca * cb);
  check_cap(out.size(), cap);
  return out;
}

TermMap ie_expand(const Expr& e, std::size_t cap) {
  switch (e.kind) {
    case Expr::Kind::True: return top();
    case Expr::Kind::False: return {};
    case Expr::Kind::Var: {
      TermMap m;
      m.emplace(Key{{e.index}, {}}, 1);
      return m;
    }
    case Expr::Kind::Not: {
      const Expr& c = e.args.front();
      if (c.kind == Expr::Kind::Var) {
        TermMap m;
        m.emplace(Key{{}, {c.index}}, 1);
        return m;
      }
      if (c.kind == Expr::Kind::Not) return ie_expand(c.args.front(), cap);
      // Complement: Q(!b) = Q(true) - Q(b).
      TermMap out = top();
      for (const auto& [k, c2] : ie_expand(c, cap)) add_term(out, k, -c2);
      check_cap(out.size(), cap);
      return out;
    }
    case Expr::Kind::And: {
      TermMap acc = ie_expand(e.args.front(), cap);
      for (std::size_t i = 1; i < e.args.size(); ++i) acc = product(acc, ie_expand(e.args[i], cap), cap);
      return acc;
    }
    case Expr::Kind::Or: {
      TermMap acc = ie_expand(e.args.front(), cap);
      for (std::size_t i = 1; i < e.args.size(); ++i) {
        const TermMap b = ie_expand(e.args[i], cap);
        const TermMap both = product(acc, b, cap);
        for (const auto& [k, c] : b) add_term(acc, k, c);
        for (const auto& [k, c] : both) add_term(acc, k, -c);
        check_cap(acc.size(), cap);
      }
      return acc;
    }
  }
  return {};
}

// Disjunctive normal form with negations pushed to literals.
std::vector<Key> dnf(const Expr& e, bool negated, std::size_t cap) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::True: return negated ? std::vector<Key>{} : std::vector<Key>{Key{}};
    case K::False: return negated ? std::vector<Key>{Key{}} : std::vector<Key>{};
    case K::Var:
      return negated ? std::vector<Key>{Key{{}, {e.index}}} : std::vector<Key>{Key{{e.index}, {}}};
    case K::Not: return dnf(e.args.front(), !negated, cap);
    case K::And:
    case K::Or: {
      const bool conj = (e.kind == K::And) != negated;
      if (!conj) {
        std::vector<Key> out;
        for (const Expr& a : e.args) {
          auto part = dnf(a, negated, cap);
          out.insert(out.end(), part.begin(), part.end());
          check_cap(out.size(), cap);
        }
        return out;
      }
      std::vector<Key> acc{Key{}};
      for (const Expr& a : e.args) {
        const auto part = dnf(a, negated, cap);
        check_cap(acc.size() * part.size() / 4, cap);
        std::vector<Key> next;
        Key k;
        for (const Key& x : acc)
          for (const Key& y : part)
            if (conjoin(x, y, k)) next.push_back(k);
        check_cap(next.size(), cap);
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

// Sum of disjoint products: c_i AND NOT(c_1 | ... | c_{i-1}) for each i.
TermMap disjoint_expand(const Expr& e, std::size_t cap) {
  const std::vector<Key> cubes = dnf(e, false, cap);
  std::vector<Key> done;
  for (const Key& ci : cubes) {
    std::vector<Key> pieces{ci};
    for (const Key& cj : done) {
      std::vector<Key> next;
      for (const Key& p : pieces) {
        if (intersects(p.first, cj.second) || intersects(p.second, cj.first)) {
          next.push_back(p);
          continue;
        }
        // Literals of cj that p does not already contain.
        std::vector<std::pair<std::size_t, bool>> lits;
        for (std::size_t v : cj.first)
          if (!std::binary_search(p.first.begin(), p.first.end(), v)) lits.emplace_back(v, true);
        for (std::size_t v : cj.second)
          if (!std::binary_search(p.second.begin(), p.second.end(), v)) lits.emplace_back(v, false);
        Key base = p;
        for (const auto& [v, positive] : lits) {
          Key piece = base;
          auto& flipped = positive ? piece.second : piece.first;
          flipped.insert(std::upper_bound(flipped.begin(), flipped.end(), v), v);
          next.push_back(std::move(piece));
          auto& kept = positive ? base.first : base.second;
          kept.insert(std::upper_bound(kept.begin(), kept.end(), v), v);
        }
      }
      check_cap(next.size(), cap);
      pieces = std::move(next);
    }
    // Earlier cubes are now disjoint from every piece; later cubes get cut
    // against ci in turn.
    for (Key& p : pieces) done.push_back(std::move(p));
    check_cap(done.size(), cap);
  }
  TermMap out;
  for (Key& k : done) add_term(out, std::move(k), 1);
  return out;
}

void check_indices(const Expr& e, std::size_t n) {
  if (e.kind == Expr::Kind::Var && e.index >= n) {
    throw Error(ErrorCode::HorizonOutOfRange, "condition references x" +
                                                  std::to_string(e.index + 1) + " beyond x" +
                                                  std::to_string(n));
  }
  for (const Expr& a : e.args) check_indices(a, n);
}

}  // namespace

// ---------------------------------------------------------------- public

TransmissionCondition parse_condition(std::string_view text, const std::vector<std::string>& labels,
                                      std::size_t h) {
  if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "no variables to resolve against");
  TransmissionCondition c;
  c.root = Parser(text, labels, h).run();
  c.text = std::string(text);
  return c;
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string any_horizon(std::string_view name, std::size_t first, std::size_t last) {
  std::string out;
  for (std::size_t t = first; t <= last; ++t) {
    if (t > first) out += " | ";
    out += std::string(name) + "_" + std::to_string(t);
  }
  return out;
}

std::vector<ConjunctionTerm> expand_terms(const Expr& cond, ExpansionMethod method,
                                          std::size_t cap) {
  const TermMap m = method == ExpansionMethod::InclusionExclusion ? ie_expand(cond, cap)
                                                                  : disjoint_expand(cond, cap);
  std::vector<ConjunctionTerm> out;
  out.reserve(m.size());
  for (const auto& [k, c] : m) out.push_back({c, k.first, k.second});
  return out;
}

DeletedSystem delete_edges(const Matrix& b, std::span<const double> omega_col,
                           const ConjunctionTerm& term) {
  const std::size_t n = b.rows();
  if (!b.is_square() || omega_col.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "B and the Omega column disagree in size");
  }
  DeletedSystem d{b, std::vector<double>(omega_col.begin(), omega_col.end())};
  for (std::size_t k : term.required) {
    for (std::size_t r = k + 1; r < n; ++r) {
      for (std::size_t s = 0; s < k; ++s) d.b(r, s) = 0.0;
      d.omega_col[r] = 0.0;
    }
  }
  for (std::size_t k : term.forbidden) {
    if (k >= n) continue;
    for (std::size_t s = 0; s < k; ++s) d.b(k, s) = 0.0;
    d.omega_col[k] = 0.0;
  }
  return d;
}

std::vector<double> effect_by_edge_deletion(const Matrix& b, std::span<const double> omega_col,
                                         const ConjunctionTerm& term, double xi) {
  const std::size_t n = b.rows();
  if (!b.is_square() || omega_col.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "B and the Omega column disagree in size");
  }
  std::vector<char> forbidden(n, 0);
  for (std::size_t k : term.forbidden)
    if (k < n) forbidden[k] = 1;

  // Deleting B(r, s) for s < k < r and Omega(r) for r > k, k required, leaves
  // row r with sources s >= (largest required k below r).
  std::vector<double> x(n, 0.0);
  auto req = term.required.begin();
  bool have_floor = false;
  std::size_t floor = 0;
  for (std::size_t r = 0; r < n; ++r) {
    while (req != term.required.end() && *req < r) {
      floor = *req++;
      have_floor = true;
    }
    if (forbidden[r]) continue;
    double v = have_floor ? 0.0 : omega_col[r];
    const auto row = b.row(r);
    for (std::size_t s = have_floor ? floor : 0; s < r; ++s) v += row[s] * x[s];
    x[r] = v;
  }
  const std::size_t max_required = term.required.empty() ? 0 : term.required.back();
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = (!term.required.empty() && max_required > j) ? 0.0 : xi * x[j];
  }
  return x;
}

EffectTable transmission_effect(const ShockSystem& sys, const TransmissionCondition& cond,
                                const EffectOptions& options) {
  const std::size_t n = sys.size();
  if (sys.b.rows() != n || sys.omega_col.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent shock system");
  }
  check_indices(cond.root, n);
  const std::vector<ConjunctionTerm> terms = expand_terms(cond.root, options.method, options.term_cap);

  EffectTable t;
  t.shock_label = sys.shock_label;
  t.condition = cond.text;
  t.k = sys.k;
  t.h = sys.h;
  t.labels = sys.ordering.labels;
  t.xi = options.xi;
  t.total = sys.phi_col();
  for (double& v : t.total) v *= options.xi;
  t.channel.assign(n, 0.0);

  // Fixed-size batches, folded in term order, keep sums independent of the
  // thread count.
  constexpr std::size_t kBatch = 256;
  std::vector<std::vector<double>> partial(std::min(kBatch, terms.size()));
  for (std::size_t start = 0; start < terms.size(); start += kBatch) {
    const std::size_t count = std::min(kBatch, terms.size() - start);
    parallel_for(count, options.threads, [&](std::size_t i) {
      partial[i] = effect_by_edge_deletion(sys.b, sys.omega_col, terms[start + i], options.xi);
    });
    for (std::size_t i = 0; i < count; ++i) {
      const double c = static_cast<double>(terms[start + i].coefficient);
      for (std::size_t j = 0; j < n; ++j) t.channel[j] += c * partial[i][j];
    }
  }
  t.complement.resize(n);
  for (std::size_t j = 0; j < n; ++j) t.complement[j] = t.total[j] - t.channel[j];
  return t;
}

namespace {

double chain_effect(std::span<const double> phi_col, const Matrix& pt,
                    const std::vector<std::size_t>& req, std::size_t j, double xi) {
  if (req.empty()) return xi * phi_col[j];
  double v = xi * phi_col[req.front()];
  for (std::size_t m = 0; m + 1 < req.size(); ++m) {
    v *= pt(req[m + 1], req[m]) / pt(req[m], req[m]);
  }
  return v * pt(j, req.back()) / pt(req.back(), req.back());
}

// Q(req AND NOT f_1 ... AND NOT f_n) = Q(.. without f_n) - Q(req + f_n ...).
double irf_term(std::span<const double> phi_col, const Matrix& pt, std::vector<std::size_t> req,
                std::vector<std::size_t> forb, std::size_t j, double xi) {
  if (forb.empty()) return chain_effect(phi_col, pt, req, j, xi);
  const std::size_t f = forb.back();
  forb.pop_back();
  const double without = irf_term(phi_col, pt, req, forb, j, xi);
  req.insert(std::upper_bound(req.begin(), req.end(), f), f);
  return without - irf_term(phi_col, pt, std::move(req), std::move(forb), j, xi);
}

}  // namespace

EffectTable effect_from_irfs(std::span<const double> phi_col, const Matrix& phi_tilde,
                             const TransmissionCondition& cond, std::size_t k,
                             const EffectOptions& options) {
  const std::size_t n = phi_col.size();
  if (k == 0 || n % k != 0 || phi_tilde.rows() != n || phi_tilde.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "IRF column and Cholesky IRF matrix disagree");
  }
  check_indices(cond.root, n);
  const auto terms = expand_terms(cond.root, options.method, options.term_cap);
  for (const auto& term : terms) {
    if (term.forbidden.size() > kMaxForbiddenRecursion) {
      throw Error(ErrorCode::UnsupportedCondition,
                  "a term negates " + std::to_string(term.forbidden.size()) +
                      " variables; the IRF route supports at most " +
                      std::to_string(kMaxForbiddenRecursion));
    }
  }

  EffectTable t;
  t.condition = cond.text;
  t.k = k;
  t.h = n / k - 1;
  t.xi = options.xi;
  t.total.resize(n);
  for (std::size_t j = 0; j < n; ++j) t.total[j] = options.xi * phi_col[j];
  t.channel.assign(n, 0.0);

  std::vector<double> per_target(n);
  parallel_for(n, options.threads, [&](std::size_t j) {
    double sum = 0.0;
    for (const auto& term : terms) {
      if (!term.required.empty() && term.required.back() > j) continue;
      if (std::binary_search(term.forbidden.begin(), term.forbidden.end(), j)) continue;
      std::vector<std::size_t> req;
      for (std::size_t r : term.required)
        if (r < j) req.push_back(r);
      std::vector<std::size_t> forb;
      for (std::size_t f : term.forbidden)
        if (f < j) forb.push_back(f);
      sum += static_cast<double>(term.coefficient) *
             irf_term(phi_col, phi_tilde, std::move(req), std::move(forb), j, options.xi);
    }
    per_target[j] = sum;
  });
  t.channel = std::move(per_target);
  t.complement.resize(n);
  for (std::size_t j = 0; j < n; ++j) t.complement[j] = t.total[j] - t.channel[j];
  return t;
}

double decomposition_gap(const EffectTable& table) {
  double worst = 0.0;
  for (std::size_t j = 0; j < table.size(); ++j) {
    const double gap = std::abs(table.channel[j] + table.complement[j] - table.total[j]);
    worst = std::max(worst, gap / std::max(1.0, std::abs(table.total[j])));
  }
  return worst;
}

}  // namespace tca
