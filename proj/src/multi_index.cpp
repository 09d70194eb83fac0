#include "fockpres/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace fockpres {

int total_degree(const MultiIndex& a) {
  int d = 0;
  for (int e : a) d += e;
  return d;
}

bool GradedLex::operator()(const MultiIndex& a, const MultiIndex& b) const {
  int da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a < b;  // lexicographic on equal degree
}

bool leq_all(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double multi_factorial(const MultiIndex& a) {
  double r = 1.0;
  for (int e : a) r *= factorial(e);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double falling(int n, int k) {
  if (k < 0) throw std::invalid_argument("falling: negative k");
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (n - i);
  return r;
}

double pbinom(const MultiIndex& beta, const MultiIndex& alpha) {
  if (beta.size() != alpha.size())
    throw std::invalid_argument("pbinom: index lengths differ");
  double r = 1.0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > beta[i]) return 0.0;
    r *= factorial(alpha[i]) * binomial(beta[i], alpha[i]);
  }
  return r;
}

static void collect_indices(int nvars, int pos, int remaining, MultiIndex& cur,
                            std::vector<MultiIndex>& out) {
  if (pos == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[pos] = e;
    collect_indices(nvars, pos + 1, remaining - e, cur, out);
  }
  cur[pos] = 0;
}

std::vector<MultiIndex> indices_up_to(int nvars, int max_deg) {
  if (nvars < 0 || max_deg < 0)
    throw std::invalid_argument("indices_up_to: negative argument");
  std::vector<MultiIndex> out;
  MultiIndex cur(nvars, 0);
  collect_indices(nvars, 0, max_deg, cur, out);
  std::sort(out.begin(), out.end(), GradedLex{});
  return out;
}

}  // namespace fockpres
