#include "hofa/group.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace hofa {

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<long long> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) factors_.push_back(1);
    order_ = 1;
    for (long long n : factors_) {
        if (n < 1) throw validation_error("group factor must be >= 1");
        if (order_ > (1LL << 40) / n) throw validation_error("group order too large");
        order_ *= n;
    }
    strides_.assign(factors_.size(), 1);
    for (std::size_t j = factors_.size(); j-- > 1;)
        strides_[j - 1] = strides_[j] * factors_[j];
}

std::vector<long long> FiniteAbelianGroup::decode(long long index) const {
    if (index < 0 || index >= order_) throw validation_error("element index out of range");
    std::vector<long long> d(factors_.size());
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        d[j] = (index / strides_[j]) % factors_[j];
    }
    return d;
}

long long FiniteAbelianGroup::encode(const std::vector<long long>& digits) const {
    if (digits.size() != factors_.size())
        throw validation_error("digit vector has wrong rank for group");
    long long idx = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        long long d = digits[j] % factors_[j];
        if (d < 0) d += factors_[j];
        idx += d * strides_[j];
    }
    return idx;
}

long long FiniteAbelianGroup::add(long long a, long long b) const {
    if (a < 0 || a >= order_ || b < 0 || b >= order_)
        throw validation_error("element index out of range");
    long long out = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        long long da = (a / strides_[j]) % factors_[j];
        long long db = (b / strides_[j]) % factors_[j];
        long long s = da + db;
        if (s >= factors_[j]) s -= factors_[j];
        out += s * strides_[j];
    }
    return out;
}

long long FiniteAbelianGroup::sub(long long a, long long b) const { return add(a, neg(b)); }

long long FiniteAbelianGroup::neg(long long a) const {
    if (a < 0 || a >= order_) throw validation_error("element index out of range");
    long long out = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        long long da = (a / strides_[j]) % factors_[j];
        long long s = da == 0 ? 0 : factors_[j] - da;
        out += s * strides_[j];
    }
    return out;
}

long long FiniteAbelianGroup::scale(long long a, long long k) const {
    if (a < 0 || a >= order_) throw validation_error("element index out of range");
    long long out = 0;
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        long long da = (a / strides_[j]) % factors_[j];
        long long s = static_cast<long long>((static_cast<__int128>(da) * k) % factors_[j]);
        if (s < 0) s += factors_[j];
        out += s * strides_[j];
    }
    return out;
}

long long FiniteAbelianGroup::exponent() const {
    long long e = 1;
    for (long long n : factors_) e = std::lcm(e, n);
    return e;
}

Rat FiniteAbelianGroup::character_angle(long long chi, long long x) const {
    if (chi < 0 || chi >= order_ || x < 0 || x >= order_)
        throw validation_error("element index out of range");
    Rat angle(0, 1);
    for (std::size_t j = 0; j < factors_.size(); ++j) {
        long long m = (chi / strides_[j]) % factors_[j];
        long long a = (x / strides_[j]) % factors_[j];
        long long prod = static_cast<long long>((static_cast<__int128>(m) * a) % factors_[j]);
        angle = angle + Rat(prod, factors_[j]);
    }
    return angle.mod1();
}

std::complex<double> FiniteAbelianGroup::character_value(long long chi, long long x) const {
    return unit_angle(character_angle(chi, x).value());
}

AdditionTable::AdditionTable(const FiniteAbelianGroup& g) : order_(g.order()) {
    if (order_ > 4096) throw resource_error("addition table requested for group of order > 4096");
    table_.resize(static_cast<std::size_t>(order_) * order_);
    neg_.resize(order_);
    for (long long a = 0; a < order_; ++a) {
        neg_[a] = static_cast<int32_t>(g.neg(a));
        for (long long b = 0; b < order_; ++b)
            table_[a * order_ + b] = static_cast<int32_t>(g.add(a, b));
    }
}

AbelianHom::AbelianHom(FiniteAbelianGroup s, FiniteAbelianGroup d, std::vector<long long> imgs)
    : src(std::move(s)), dst(std::move(d)), images(std::move(imgs)) {
    if (images.size() != src.rank())
        throw validation_error("homomorphism needs one generator image per source factor");
    for (std::size_t j = 0; j < images.size(); ++j) {
        if (images[j] < 0 || images[j] >= dst.order())
            throw validation_error("generator image out of range");
        if (dst.scale(images[j], src.factors()[j]) != 0)
            throw validation_error("generator image order incompatible with source factor");
    }
}

long long AbelianHom::apply(long long x) const {
    auto digits = src.decode(x);
    long long out = 0;
    for (std::size_t j = 0; j < images.size(); ++j)
        out = dst.add(out, dst.scale(images[j], digits[j]));
    return out;
}

long long AbelianHom::dual_apply(long long chi_dst) const {
    // chi_dst composed with the map; frequency at the j-th source factor is
    // n_j times the angle of chi_dst at the image of e_j.
    std::vector<long long> freq(src.rank());
    for (std::size_t j = 0; j < src.rank(); ++j) {
        Rat a = dst.character_angle(chi_dst, images[j]);
        Rat m = a * Rat::of(src.factors()[j]);
        if (m.den != 1) throw internal_error("dual character frequency not integral");
        freq[j] = m.num;
    }
    return src.encode(freq);
}

std::vector<long long> subgroup_closure(const FiniteAbelianGroup& g,
                                        const std::vector<long long>& gens) {
    std::set<long long> seen{0};
    std::vector<long long> frontier{0};
    while (!frontier.empty()) {
        std::vector<long long> next;
        for (long long x : frontier) {
            for (long long h : gens) {
                long long y = g.add(x, h);
                if (seen.insert(y).second) next.push_back(y);
            }
        }
        frontier = std::move(next);
    }
    return std::vector<long long>(seen.begin(), seen.end());
}

bool is_subgroup(const FiniteAbelianGroup& g, const std::vector<long long>& elems) {
    std::set<long long> s(elems.begin(), elems.end());
    if (!s.count(0)) return false;
    for (long long a : s)
        for (long long b : s)
            if (!s.count(g.add(a, b))) return false;
    return true;
}

std::vector<long long> annihilator(const FiniteAbelianGroup& g,
                                   const std::vector<long long>& elems) {
    std::vector<long long> out;
    for (long long chi = 0; chi < g.order(); ++chi) {
        bool ok = true;
        for (long long e : elems) {
            if (g.character_angle(chi, e).num != 0) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(chi);
    }
    return out;
}

namespace {

// Smith normal form of the column lattice spanned by `cols`, tracking the
// row transform U (so that U * lattice = diag(d) * Z^c).
struct SmithResult {
    std::vector<long long> diag;
    std::vector<std::vector<long long>> u;
};

SmithResult smith_form(std::vector<std::vector<long long>> a, std::size_t rows) {
    const std::size_t cols = a.empty() ? 0 : a[0].size();
    std::vector<std::vector<long long>> u(rows, std::vector<long long>(rows, 0));
    for (std::size_t i = 0; i < rows; ++i) u[i][i] = 1;

    auto row_sub = [&](std::size_t dst, std::size_t src, long long q) {
        for (std::size_t j = 0; j < cols; ++j) a[dst][j] -= q * a[src][j];
        for (std::size_t j = 0; j < rows; ++j) u[dst][j] -= q * u[src][j];
    };
    auto row_swap = [&](std::size_t i1, std::size_t i2) {
        std::swap(a[i1], a[i2]);
        std::swap(u[i1], u[i2]);
    };
    auto col_sub = [&](std::size_t dst, std::size_t src, long long q) {
        for (std::size_t i = 0; i < rows; ++i) a[i][dst] -= q * a[i][src];
    };
    auto col_swap = [&](std::size_t j1, std::size_t j2) {
        for (std::size_t i = 0; i < rows; ++i) std::swap(a[i][j1], a[i][j2]);
    };

    std::size_t k = 0;
    const std::size_t kmax = std::min(rows, cols);
    while (k < kmax) {
        // locate a minimal nonzero pivot in the trailing submatrix
        std::size_t pi = k, pj = k;
        long long best = 0;
        for (std::size_t i = k; i < rows; ++i) {
            for (std::size_t j = k; j < cols; ++j) {
                long long v = a[i][j] < 0 ? -a[i][j] : a[i][j];
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (best == 0) break;
        if (pi != k) row_swap(k, pi);
        if (pj != k) col_swap(k, pj);

        bool clean = true;
        for (std::size_t i = k + 1; i < rows; ++i) {
            if (a[i][k] != 0) {
                long long q = a[i][k] / a[k][k];
                row_sub(i, k, q);
                if (a[i][k] != 0) clean = false;
            }
        }
        for (std::size_t j = k + 1; j < cols; ++j) {
            if (a[k][j] != 0) {
                long long q = a[k][j] / a[k][k];
                col_sub(j, k, q);
                if (a[k][j] != 0) clean = false;
            }
        }
        if (!clean) continue; // smaller remainders exist; reselect pivot

        // enforce divisibility of the remaining entries by the pivot
        bool fixed = false;
        for (std::size_t i = k + 1; i < rows && !fixed; ++i) {
            for (std::size_t j = k + 1; j < cols && !fixed; ++j) {
                if (a[i][j] % a[k][k] != 0) {
                    row_sub(k, i, -1); // add row i to row k, reintroducing column work
                    fixed = true;
                }
            }
        }
        if (fixed) continue;

        if (a[k][k] < 0) {
            for (std::size_t j = 0; j < cols; ++j) a[k][j] = -a[k][j];
            for (std::size_t j = 0; j < rows; ++j) u[k][j] = -u[k][j];
        }
        ++k;
    }

    SmithResult r;
    r.diag.resize(rows, 0);
    for (std::size_t i = 0; i < rows; ++i) r.diag[i] = i < kmax ? a[i][i] : 0;
    r.u = std::move(u);
    return r;
}

} // namespace

QuotientData::QuotientData(const FiniteAbelianGroup& g, const std::vector<long long>& subgroup_gens)
    : src_(g), quo_({1}) {
    const std::size_t r = g.rank();
    // columns: the subgroup generators plus n_j e_j
    std::vector<std::vector<long long>> a(r);
    const std::size_t c = subgroup_gens.size() + r;
    for (std::size_t i = 0; i < r; ++i) a[i].assign(c, 0);
    for (std::size_t s = 0; s < subgroup_gens.size(); ++s) {
        auto digits = g.decode(subgroup_gens[s]);
        for (std::size_t i = 0; i < r; ++i) a[i][s] = digits[i];
    }
    for (std::size_t i = 0; i < r; ++i) a[i][subgroup_gens.size() + i] = g.factors()[i];

    SmithResult sf = smith_form(std::move(a), r);
    for (long long d : sf.diag)
        if (d <= 0) throw internal_error("quotient lattice is not full rank");
    quo_ = FiniteAbelianGroup(sf.diag);
    u_ = std::move(sf.u);
}

long long QuotientData::project(long long x) const {
    auto digits = src_.decode(x);
    std::vector<long long> y(quo_.rank());
    for (std::size_t i = 0; i < quo_.rank(); ++i) {
        long long acc = 0;
        for (std::size_t j = 0; j < src_.rank(); ++j) acc += u_[i][j] * digits[j];
        long long d = quo_.factors()[i];
        acc %= d;
        if (acc < 0) acc += d;
        y[i] = acc;
    }
    return quo_.encode(y);
}

long long QuotientData::lift_character(long long chi_quo) const {
    auto mu = quo_.decode(chi_quo);
    std::vector<long long> freq(src_.rank());
    for (std::size_t j = 0; j < src_.rank(); ++j) {
        Rat angle(0, 1);
        for (std::size_t i = 0; i < quo_.rank(); ++i) {
            long long uij = u_[i][j] % quo_.factors()[i];
            angle = angle + Rat(mu[i] * uij, quo_.factors()[i]);
        }
        Rat m = angle.mod1() * Rat::of(src_.factors()[j]);
        if (m.den != 1) throw internal_error("lifted character frequency not integral");
        freq[j] = m.num;
    }
    return src_.encode(freq);
}

} // namespace hofa
