#pragma once

#include "hofa/config.hpp"
#include "hofa/function.hpp"

namespace hofa {

/**
 * System of 2^k functions on one group, indexed by subset masks of
 * {0, ..., k-1}.  Bit i of the mask corresponds to the i-th shift
 * coordinate.
 */
struct FunctionSystem {
    int order; // k
    std::vector<GroupFunction> f;

    FunctionSystem(int k, std::vector<GroupFunction> fs);
    /// All 2^k slots hold the same function.
    static FunctionSystem constant(const GroupFunction& fn, int k);

    const FiniteAbelianGroup& group() const { return f.front().group(); }
    const GroupFunction& at(unsigned mask) const { return f.at(mask); }
};

/// k-fold direct power of a group; element index of (t_1, ..., t_k) is
/// sum_j index(t_j) * |A|^(k-1-j), consistent with concatenated digits.
FiniteAbelianGroup power_group(const FiniteAbelianGroup& g, int k);

/**
 * Convolution of order k: the function on A^k whose value at (t_1, ..., t_k)
 * is E_x prod_{S subset [k]} f_S(x + sum_{i in S} t_i).  No conjugations.
 * Cost |A|^(k+1) 2^k elementary terms; guarded by cfg.budget.
 */
GroupFunction convolution(const FunctionSystem& F, const RunConfig& cfg = RunConfig::from_env());

/**
 * Box inner product of order k: E_{x, t_1..t_k} prod_S C^|S| f_S(x + sigma_S)
 * where C is conjugation applied when |S| is odd.  Same cost model as
 * convolution.
 */
cplx box_inner(const FunctionSystem& F, const RunConfig& cfg = RunConfig::from_env());

/**
 * Uniformity norm of order k >= 1.  Computed by the exact recursion
 * ||f||_{U_k}^{2^k} = E_t ||Delta_t f||_{U_{k-1}}^{2^{k-1}} with the order-2
 * base case evaluated through the Fourier coefficients and order 1 as the
 * absolute mean.
 */
double uk_norm(const GroupFunction& fn, int k, const RunConfig& cfg = RunConfig::from_env());

/// ||f||_{U_k}^{2^k}, the natural quantity of the recursion.
double uk_norm_power(const GroupFunction& fn, int k,
                     const RunConfig& cfg = RunConfig::from_env());

/// prod_S ||f_S||_{U_k}: the generalized Cauchy-Schwarz bound on |box_inner|.
double box_inner_norm_bound(const FunctionSystem& F,
                            const RunConfig& cfg = RunConfig::from_env());

/**
 * Splits a system of order k+1 into the two order-k systems whose
 * convolutions realize the box inner product:
 *   box_inner(F) = E_t conv(bottom)(t) * conj(conv(top)(t)).
 * bottom_S = C^|S| f_S and top_S = C^|S| f_{S + top coordinate}.
 */
FunctionSystem bottom_system(const FunctionSystem& F);
FunctionSystem top_system(const FunctionSystem& F);

/**
 * The order-(k+1) system whose box inner product equals
 * ||conv(F)||_2^2 exactly: both slots S and S+{k} hold C^|S| f_S.
 */
FunctionSystem doubled_system(const FunctionSystem& F);

/**
 * Averaged interpolation bound on ||conv(F)||_2^2 along coordinate i:
 *   E_u prod_{S not containing i} || x -> f_S(x) f_{S+{i}}(x+u) ||_{U_k}.
 * Dominates ||conv(F)||_2^2 whenever every |f_S| <= 1.
 */
double conv_l2_interpolation_bound(const FunctionSystem& F, int i,
                                   const RunConfig& cfg = RunConfig::from_env());

} // namespace hofa
