#pragma once
// Distributional statistics of permutation sums of an n x n matrix of
// iid rate-1 exponentials Y_ij, used to sanity-check the convergence
// experiments against closed forms.
//
// Z_{n,k} counts permutations whose sum lands in [(k-1)n, kn); its mean
// is   E Z_{n,k} = n! * [P(n, kn) - P(n, (k-1)n)]
// with P the regularized lower incomplete gamma (a permutation sum is a
// Gamma(n,1) variable, and there are n! of them).  Bins for large k get
// the difference of *upper* tails so nothing cancels.
//
// max_perm_sum is the exact maximum of the permutation sums (an
// assignment problem, solved in O(n^2 m) with potentials - usable at n
// in the thousands).
//
// max_exp_diagnostic samples R = max_i Y_i / log n and reports the
// empirical P(R <= t), P(R >= t) and E e^R next to the closed-form
// bounds exp(-n^(1-t)), n^(1-t) and exp(1 + 1/(log n - 1)).

#include <cstdint>
#include <map>
#include <vector>

#include "logperm/matrix.hpp"
#include "logperm/randsrc.hpp"

namespace logperm {

// regularized incomplete gamma: P(a,x) lower, Q(a,x) = 1 - P(a,x) upper.
// Series for x < a+1, Lentz continued fraction otherwise; both converge
// to ~1e-15 relative, comfortably under the 1e-12 target.
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

// E Z_{n,k}; log version never overflows, linear version overflows for
// n! beyond double range (n > 170)
double expected_z_log(int n, int k);
double expected_z(int n, int k);

struct ZHistogram {
    int n = 0;
    std::uint64_t trials = 0;
    std::map<int, std::uint64_t> counts;               // bin k -> total count
    std::map<int, std::vector<std::uint64_t>> per_trial; // bin k -> per-trial counts
};

// full S_n enumeration per trial; n <= 8 (8! = 40320 permutations)
ZHistogram z_histogram(int n, std::uint64_t trials, const SeedSpec& s);

// maximum over injections of sum of log-entries (assignment problem)
double max_perm_sum(const LogMatrix& a);

struct MaxStats {
    int n = 0;
    std::uint64_t trials = 0;
    std::vector<double> r_samples; // R = max of n iid Exp(1) / log n, >= 0
};

MaxStats collect_max_stats(int n, std::uint64_t trials, const SeedSpec& s);

struct MaxExpDiag {
    int n = 0;
    std::uint64_t trials = 0;
    double t = 0.0;
    double p_le = 0.0, p_ge = 0.0;   // empirical P(R <= t), P(R >= t)
    double mean_exp_r = 0.0;         // empirical E e^R
    double se_mean_exp = 0.0;        // standard error of that mean
    double bound_p_le = 0.0;         // exp(-n^(1-t))
    double bound_p_ge = 0.0;         // n^(1-t)
    double bound_mean = 0.0;         // exp(1 + 1/(log n - 1))
};

// n >= 3 so that log n > 1 and the mean bound is finite
MaxExpDiag max_exp_diagnostic(int n, std::uint64_t trials, double t, const SeedSpec& s);

// threshold n log n + n log log n / lambda for the permutation-sum
// extreme check (n >= 3)
double maxperm_threshold(int n, double lambda);

} // namespace logperm
