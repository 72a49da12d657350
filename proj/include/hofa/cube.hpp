#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hofa/function.hpp"

namespace hofa {

/**
 * Face of the discrete cube {0,1}^d.  A face is determined by a set F of
 * free coordinates and a disjoint offset set K; its members are the 2^|F|
 * vertices S union K with S inside F.  Vertices are bitmasks of width d.
 */
struct Face {
    int d = 0;
    std::uint32_t free_mask = 0;
    std::uint32_t offset_mask = 0;

    Face() = default;
    Face(int dim, std::uint32_t free, std::uint32_t offset);

    int dimension() const;
    /// All member vertices, in increasing order of the free subset mask.
    std::vector<std::uint32_t> members() const;
    bool contains_vertex(std::uint32_t v) const;

    bool operator==(const Face& o) const {
        return d == o.d && free_mask == o.free_mask && offset_mask == o.offset_mask;
    }
};

/// All faces of dimension n in the d-cube, ordered lexicographically by
/// (free mask, offset mask).  There are C(d,n) * 2^(d-n) of them.
std::vector<Face> enumerate_faces(int d, int n);

/// Labeling of the d-cube by elements of a finite abelian group, stored as
/// element indices per vertex mask.
struct CubeLabeling {
    int d;
    FiniteAbelianGroup group;
    std::vector<long long> values; // size 2^d

    CubeLabeling(int dim, FiniteAbelianGroup g);
    long long at(std::uint32_t vertex) const { return values.at(vertex); }
    void set(std::uint32_t vertex, long long v) { values.at(vertex) = v; }
    bool operator==(const CubeLabeling& o) const;
};

/**
 * Membership in B_{d,k}: the (unsigned) product of labels over every face of
 * dimension d-k+1 must be the group identity.
 */
bool bdk_membership(const CubeLabeling& h, int k);

/**
 * Generator labeling attached to a k-dimensional face: value a^{epsilon(S)}
 * on members S of the face with epsilon(S) = (-1)^|S|, identity elsewhere.
 */
CubeLabeling bdk_generator(const Face& face, long long a, const FiniteAbelianGroup& g);

struct GeneratorFactor {
    Face face;
    long long value;
};

/// Sum of the generator labelings described by the factors.
CubeLabeling recompose(int d, const FiniteAbelianGroup& g,
                       const std::vector<GeneratorFactor>& factors);

/**
 * Writes a member of B_{d,k} as a sum of k-face generators, following the
 * inductive construction that peels the smallest free coordinate at each
 * level.  Returns nothing exactly when h is not a member.
 */
std::optional<std::vector<GeneratorFactor>> bdk_decompose(const CubeLabeling& h, int k);

/// Signed permutation of the cube: S -> pi(S) symmetric-difference K.
struct CubeAutomorphism {
    int d;
    std::vector<int> perm;  // image of each coordinate under pi
    std::uint32_t flip;     // K

    CubeAutomorphism(int dim, std::vector<int> p, std::uint32_t k);
    static CubeAutomorphism identity(int dim);

    std::uint32_t apply_vertex(std::uint32_t s) const;
    CubeAutomorphism compose(const CubeAutomorphism& inner) const; // this after inner
    CubeAutomorphism inverse() const;
};

/// (sigma . h)(S) = h(sigma^{-1}(S)).
CubeLabeling apply_cube_automorphism(const CubeAutomorphism& sigma, const CubeLabeling& h);

/// psi_S(x, t_1, ..., t_d) = x + sum of t_i over i in S.  point holds the
/// element indices (x, t_1, ..., t_d).
long long cube_vertex_map(const FiniteAbelianGroup& g, std::uint32_t S,
                          const std::vector<long long>& point);

/**
 * Product over the members S of the face of f_S evaluated at the vertex map
 * of the point.  The system maps vertex masks to functions and must cover
 * every member.
 */
cplx eval_face_product(const std::map<std::uint32_t, GroupFunction>& system, const Face& face,
                       const std::vector<long long>& point);

} // namespace hofa
