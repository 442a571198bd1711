#include "hkt/bps.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace hkt {

Rational Rational::parse(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ConfigError("empty rational literal");
  auto parse_int = [](const std::string& t) -> long long {
    if (t.empty()) throw ConfigError("malformed rational literal");
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) throw ConfigError("malformed rational literal");
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i])))
        throw ConfigError("malformed rational literal '" + t + "'");
    return std::stoll(t);
  };
  Rational r;
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    r.num = parse_int(s);
    r.den = 1;
  } else {
    r.num = parse_int(s.substr(0, slash));
    r.den = parse_int(s.substr(slash + 1));
    if (r.den == 0) throw ConfigError("rational with zero denominator");
  }
  if (r.den < 0) {
    r.num = -r.num;
    r.den = -r.den;
  }
  long long g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

Charge Charge::negated() const {
  Charge c = *this;
  for (int& v : c.m) v = -v;
  for (int& v : c.k) v = -v;
  return c;
}

bool Charge::is_zero() const {
  auto zero = [](const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
  };
  return zero(m) && zero(k);
}

long long darboux_pairing(const Charge& a, const Charge& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.m.size(); ++i)
    s += static_cast<long long>(a.m[i]) * b.k[i] - static_cast<long long>(a.k[i]) * b.m[i];
  return s;
}

namespace {

std::string charge_str(const Charge& c) {
  std::ostringstream os;
  os << "(m=[";
  for (std::size_t i = 0; i < c.m.size(); ++i) os << (i ? "," : "") << c.m[i];
  os << "], k=[";
  for (std::size_t i = 0; i < c.k.size(); ++i) os << (i ? "," : "") << c.k[i];
  os << "])";
  return os.str();
}

std::vector<int> charge_key(const Charge& c) {
  std::vector<int> key = c.m;
  key.insert(key.end(), c.k.begin(), c.k.end());
  return key;
}

}  // namespace

BpsStructure BpsStructure::make(int n,
                                const std::vector<std::pair<Charge, Rational>>& entries) {
  if (n < 1) throw ConfigError("charge dimension must be at least 1");
  BpsStructure out;
  out.n_ = n;

  std::map<std::vector<int>, std::size_t> seen;  // key -> index into pairs_
  for (const auto& [gamma, omega] : entries) {
    if (static_cast<int>(gamma.m.size()) != n || static_cast<int>(gamma.k.size()) != n)
      throw ConfigError("charge vectors must each have n entries");
    if (omega.num == 0) continue;
    if (gamma.is_zero())
      throw ZeroCharge("charge with nonzero index " + std::to_string(omega.num) + "/" +
                       std::to_string(omega.den) + " must itself be nonzero");
    auto key = charge_key(gamma);
    auto neg_key = charge_key(gamma.negated());
    if (auto it = seen.find(key); it != seen.end()) {
      if (!(out.pairs_[it->second].omega == omega))
        throw ParityViolation("conflicting indices for charge " + charge_str(gamma));
      continue;
    }
    if (auto it = seen.find(neg_key); it != seen.end()) {
      if (!(out.pairs_[it->second].omega == omega))
        throw ParityViolation("indices of " + charge_str(gamma) +
                              " and its negative disagree");
      continue;
    }
    seen.emplace(std::move(key), out.pairs_.size());
    out.pairs_.push_back({gamma, omega});
  }

  // Mutual commutativity comes first: a coupled pair is reported even when the
  // entries also leave the adapted frame.
  for (std::size_t a = 0; a < out.pairs_.size(); ++a)
    for (std::size_t b = a + 1; b < out.pairs_.size(); ++b) {
      long long p = darboux_pairing(out.pairs_[a].gamma, out.pairs_[b].gamma);
      if (p != 0) {
        std::ostringstream os;
        os << "support charges " << charge_str(out.pairs_[a].gamma) << " and "
           << charge_str(out.pairs_[b].gamma) << " have pairing " << p;
        throw CoupledSupport(os.str());
      }
    }
  for (const auto& sp : out.pairs_) {
    if (std::any_of(sp.gamma.m.begin(), sp.gamma.m.end(), [](int x) { return x != 0; }))
      throw MixedFrame("support charge " + charge_str(sp.gamma) +
                       " has a nonzero frame component; an adapted frame requires m = 0");
  }
  return out;
}

double BpsStructure::omega_max() const {
  double m = 0.0;
  for (const auto& sp : pairs_) m = std::max(m, std::abs(sp.omega.value()));
  return m;
}

CentralCharge central_charge(const BpsStructure& bps, const ChartJet& jet,
                             const Charge& gamma) {
  const int n = bps.dim();
  if (static_cast<int>(gamma.m.size()) != n || static_cast<int>(gamma.k.size()) != n)
    throw ConfigError("charge dimension does not match the structure");
  if (jet.Z.size() != n) throw ConfigError("jet dimension does not match the structure");
  CentralCharge out;
  out.value = cx(0, 0);
  for (int i = 0; i < n; ++i)
    out.value += static_cast<double>(gamma.m[static_cast<std::size_t>(i)]) * jet.Zlow(i) +
                 static_cast<double>(gamma.k[static_cast<std::size_t>(i)]) * jet.Z(i);
  out.fiber_m = gamma.m;
  out.fiber_k = gamma.k;
  return out;
}

}  // namespace hkt
