#include "hofa/cube.hpp"

#include <bit>

namespace hofa {

namespace {

int parity_sign(std::uint32_t mask) { return (std::popcount(mask) & 1) ? -1 : 1; }

void check_dim(int d) {
    if (d < 1 || d > 20) throw validation_error("cube dimension must be between 1 and 20");
}

} // namespace

Face::Face(int dim, std::uint32_t free, std::uint32_t offset)
    : d(dim), free_mask(free), offset_mask(offset) {
    check_dim(d);
    const std::uint32_t all = (d == 32) ? ~0u : ((1u << d) - 1);
    if ((free_mask | offset_mask) & ~all) throw validation_error("face uses coordinates beyond d");
    if (free_mask & offset_mask) throw validation_error("face free and offset sets must be disjoint");
}

int Face::dimension() const { return std::popcount(free_mask); }

std::vector<std::uint32_t> Face::members() const {
    std::vector<std::uint32_t> out;
    out.reserve(std::size_t(1) << dimension());
    std::uint32_t s = 0;
    while (true) {
        out.push_back(s | offset_mask);
        if (s == free_mask) break;
        s = (s - free_mask) & free_mask; // next subset of the free set
    }
    return out;
}

bool Face::contains_vertex(std::uint32_t v) const {
    return (v & ~(free_mask | offset_mask)) == 0 && (v & offset_mask) == offset_mask;
}

std::vector<Face> enumerate_faces(int d, int n) {
    check_dim(d);
    if (n < 0 || n > d) throw validation_error("face dimension out of range");
    std::vector<Face> out;
    const std::uint32_t all = (1u << d) - 1;
    for (std::uint32_t f = 0; f <= all; ++f) {
        if (std::popcount(f) != n) continue;
        const std::uint32_t comp = all & ~f;
        std::uint32_t k = 0;
        while (true) {
            out.emplace_back(d, f, k);
            if (k == comp) break;
            k = (k - comp) & comp;
        }
    }
    return out;
}

CubeLabeling::CubeLabeling(int dim, FiniteAbelianGroup g)
    : d(dim), group(std::move(g)), values(std::size_t(1) << dim, 0) {
    check_dim(d);
}

bool CubeLabeling::operator==(const CubeLabeling& o) const {
    return d == o.d && group == o.group && values == o.values;
}

bool bdk_membership(const CubeLabeling& h, int k) {
    if (k < 1 || k > h.d) throw validation_error("order k must satisfy 1 <= k <= d");
    for (const Face& face : enumerate_faces(h.d, h.d - k + 1)) {
        long long prod = 0;
        for (std::uint32_t v : face.members()) prod = h.group.add(prod, h.at(v));
        if (prod != 0) return false;
    }
    return true;
}

CubeLabeling bdk_generator(const Face& face, long long a, const FiniteAbelianGroup& g) {
    CubeLabeling out(face.d, g);
    for (std::uint32_t v : face.members()) out.set(v, g.scale(a, parity_sign(v)));
    return out;
}

CubeLabeling recompose(int d, const FiniteAbelianGroup& g,
                       const std::vector<GeneratorFactor>& factors) {
    CubeLabeling out(d, g);
    for (const auto& fac : factors) {
        if (fac.face.d != d) throw validation_error("factor face dimension mismatch");
        for (std::uint32_t v : fac.face.members())
            out.set(v, g.add(out.at(v), g.scale(fac.value, parity_sign(v))));
    }
    return out;
}

namespace {

// One level of the inductive decomposition.  `coords` is the bitmask of the
// coordinates of the current subcube; `h` maps absolute vertex masks
// (subsets of coords) to group element indices.  Emitted faces use absolute
// masks throughout, so they are faces of the original cube as well.
bool decompose_rec(const FiniteAbelianGroup& g, int d_total,
                   std::map<std::uint32_t, long long>& h, std::uint32_t coords, int k,
                   std::vector<GeneratorFactor>& out) {
    const int dim = std::popcount(coords);

    if (k == 0) {
        // every vertex is its own zero-dimensional face
        for (auto& [v, val] : h) {
            if (val == 0) continue;
            out.push_back({Face(d_total, 0, v), g.scale(val, parity_sign(v))});
        }
        return true;
    }

    if (dim == k) {
        // a single generator on the whole subcube is the only possible form
        const long long a = h.at(0);
        for (auto& [v, val] : h) {
            if (val != g.scale(a, parity_sign(v))) return false;
        }
        if (a != 0) out.push_back({Face(d_total, coords, 0), a});
        return true;
    }

    const std::uint32_t ibit = coords & (~coords + 1); // smallest free coordinate
    const std::uint32_t rest = coords & ~ibit;

    // labels of the vertices containing i, reindexed onto the smaller cube
    std::map<std::uint32_t, long long> hi;
    for (auto& [v, val] : h)
        if (v & ibit) hi[v & ~ibit] = val;

    std::vector<GeneratorFactor> sub1;
    if (!decompose_rec(g, d_total, hi, rest, k - 1, sub1)) return false;

    // lifting a factor across i negates its values on the i side, so adding
    // the lifted generators clears every vertex containing i
    std::map<std::uint32_t, long long> p = h;
    for (auto& fac : sub1) {
        Face lifted(d_total, fac.face.free_mask | ibit, fac.face.offset_mask);
        for (std::uint32_t v : lifted.members())
            p[v] = g.add(p[v], g.scale(fac.value, parity_sign(v)));
        out.push_back({lifted, g.neg(fac.value)});
    }

    std::map<std::uint32_t, long long> r;
    for (auto& [v, val] : p) {
        if (v & ibit) {
            if (val != 0) throw internal_error("projection failed to clear a vertex");
        } else {
            r[v] = val;
        }
    }
    return decompose_rec(g, d_total, r, rest, k, out);
}

} // namespace

std::optional<std::vector<GeneratorFactor>> bdk_decompose(const CubeLabeling& h, int k) {
    if (k < 1 || k > h.d) throw validation_error("order k must satisfy 1 <= k <= d");
    std::map<std::uint32_t, long long> vals;
    for (std::uint32_t v = 0; v < (1u << h.d); ++v) vals[v] = h.at(v);
    std::vector<GeneratorFactor> out;
    if (!decompose_rec(h.group, h.d, vals, (1u << h.d) - 1, k, out)) return std::nullopt;
    return out;
}

CubeAutomorphism::CubeAutomorphism(int dim, std::vector<int> p, std::uint32_t k)
    : d(dim), perm(std::move(p)), flip(k) {
    check_dim(d);
    if (perm.size() != static_cast<std::size_t>(d))
        throw validation_error("permutation must cover all coordinates");
    std::uint32_t seen = 0;
    for (int v : perm) {
        if (v < 0 || v >= d || (seen & (1u << v)))
            throw validation_error("not a permutation of the coordinates");
        seen |= 1u << v;
    }
    if (flip & ~((1u << d) - 1)) throw validation_error("flip set beyond dimension");
}

CubeAutomorphism CubeAutomorphism::identity(int dim) {
    std::vector<int> p(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) p[static_cast<std::size_t>(j)] = j;
    return CubeAutomorphism(dim, std::move(p), 0);
}

std::uint32_t CubeAutomorphism::apply_vertex(std::uint32_t s) const {
    std::uint32_t img = 0;
    for (int j = 0; j < d; ++j)
        if (s & (1u << j)) img |= 1u << perm[static_cast<std::size_t>(j)];
    return img ^ flip;
}

CubeAutomorphism CubeAutomorphism::compose(const CubeAutomorphism& inner) const {
    if (d != inner.d) throw validation_error("automorphism dimensions differ");
    // vertex path: s -> inner -> this
    std::vector<int> p(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
        p[static_cast<std::size_t>(j)] =
            perm[static_cast<std::size_t>(inner.perm[static_cast<std::size_t>(j)])];
    std::uint32_t pk = 0;
    for (int j = 0; j < d; ++j)
        if (inner.flip & (1u << j)) pk |= 1u << perm[static_cast<std::size_t>(j)];
    return CubeAutomorphism(d, std::move(p), pk ^ flip);
}

CubeAutomorphism CubeAutomorphism::inverse() const {
    std::vector<int> p(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] = j;
    std::uint32_t pk = 0;
    for (int j = 0; j < d; ++j)
        if (flip & (1u << perm[static_cast<std::size_t>(j)])) pk |= 1u << j;
    return CubeAutomorphism(d, std::move(p), pk);
}

CubeLabeling apply_cube_automorphism(const CubeAutomorphism& sigma, const CubeLabeling& h) {
    if (sigma.d != h.d) throw validation_error("automorphism and labeling dimensions differ");
    CubeAutomorphism inv = sigma.inverse();
    CubeLabeling out(h.d, h.group);
    for (std::uint32_t v = 0; v < (1u << h.d); ++v) out.set(v, h.at(inv.apply_vertex(v)));
    return out;
}

long long cube_vertex_map(const FiniteAbelianGroup& g, std::uint32_t S,
                          const std::vector<long long>& point) {
    if (point.empty()) throw validation_error("point needs at least the base coordinate");
    const int d = static_cast<int>(point.size()) - 1;
    if (S & ~((d >= 32) ? ~0u : ((1u << d) - 1)))
        throw validation_error("vertex uses coordinates beyond the point arity");
    long long y = point[0];
    for (int i = 0; i < d; ++i)
        if (S & (1u << i)) y = g.add(y, point[static_cast<std::size_t>(i) + 1]);
    return y;
}

cplx eval_face_product(const std::map<std::uint32_t, GroupFunction>& system, const Face& face,
                       const std::vector<long long>& point) {
    if (static_cast<int>(point.size()) != face.d + 1)
        throw validation_error("point arity must be the cube dimension plus one");
    cplx prod{1.0, 0.0};
    for (std::uint32_t v : face.members()) {
        auto it = system.find(v);
        if (it == system.end())
            throw validation_error("system is missing a function for a face member");
        prod *= it->second[static_cast<std::size_t>(cube_vertex_map(it->second.group(), v, point))];
    }
    return prod;
}

} // namespace hofa
