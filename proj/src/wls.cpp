#include "ibflow/wls.hpp"

#include <algorithm>
#include <cmath>

#include "ibflow/errors.hpp"
#include "ibflow/parallel.hpp"

namespace ibflow {

PolyBasis::PolyBasis(int p) : degree(p) {
    if (p < 0) throw InvalidInputError("basis degree must be >= 0");
    for (int d = 0; d <= p; ++d)
        for (int i = d; i >= 0; --i)
            for (int j = d - i; j >= 0; --j)
                monomials.push_back({i, j, d - i - j});
}

VecX eval_basis(int degree, const Vec3& x) {
    const PolyBasis basis(degree);
    VecX row(basis.n_coeffs());
    for (int k = 0; k < basis.n_coeffs(); ++k) {
        const auto& m = basis.monomials[k];
        double v = 1.0;
        for (int e = 0; e < m[0]; ++e) v *= x.x();
        for (int e = 0; e < m[1]; ++e) v *= x.y();
        for (int e = 0; e < m[2]; ++e) v *= x.z();
        row(k) = v;
    }
    return row;
}

VecX compute_weights(const Stencil& stencil, const PrincipalDirections& pd) {
    const int n = static_cast<int>(stencil.members.size() + stencil.boundary_obs.size());
    VecX w(n + 1);
    w(0) = 1.0; // the IB point
    if (n == 0) return w;

    std::vector<double> dist(n);
    int k = 0;
    for (const auto& m : stencil.members)
        dist[k++] = anisotropic_distance(pd, stencil.ib.point, m.centre);
    for (const auto& o : stencil.boundary_obs)
        dist[k++] = anisotropic_distance(pd, stencil.ib.point, o.position);

    double d0 = *std::min_element(dist.begin(), dist.end());
    d0 = std::max(d0, 1e-300);
    for (int i = 0; i < n; ++i) {
        const double r = dist[i] / d0;
        w(i + 1) = std::clamp(1.0 / (1.0 + r * r), 0.0, 1.0);
    }
    return w;
}

double WlsFit::evaluate(const Vec3& x) const {
    const Vec3 xi = (x - centre) / scale;
    return eval_basis(effective_degree, xi).dot(beta);
}

VecX WlsFit::evaluate_map(const Vec3& x) const {
    const Vec3 xi = (x - centre) / scale;
    return (eval_basis(effective_degree, xi).transpose() * coeff_map).transpose();
}

namespace {

constexpr double kConditionLimit = 1e10;

/// Attempt a design at fixed degree. Returns false when the column space is
/// unusable (too few observations or genuinely ill-conditioned) so the
/// caller reduces the degree. Rank deficiency confined to directions the
/// data cannot see (e.g. single-layer planar meshes) is solved in-place by
/// dropping the unseen columns.
bool try_design(int degree, const std::vector<Vec3>& points, const VecX& weights,
                const Vec3& centre, double scale, WlsFit& out) {
    const int n_obs = static_cast<int>(points.size());
    const PolyBasis basis(degree);
    const int nc = basis.n_coeffs();
    if (n_obs < nc && degree > 0) return false;

    MatX A(n_obs, nc);
    for (int i = 0; i < n_obs; ++i)
        A.row(i) = eval_basis(degree, (points[i] - centre) / scale).transpose();
    const VecX sqw = weights.cwiseMax(0.0).cwiseSqrt();
    MatX Aw = sqw.asDiagonal() * A;

    Eigen::ColPivHouseholderQR<MatX> qr(Aw);
    qr.setThreshold(1e-12);
    const int rank = static_cast<int>(qr.rank());
    if (rank < 1) return false;

    const auto& R = qr.matrixR();
    const double r0 = std::abs(R(0, 0));
    const double rk = std::abs(R(rank - 1, rank - 1));
    const double condition = rk > 0.0 ? r0 / rk : std::numeric_limits<double>::infinity();
    if (degree > 0 && condition > kConditionLimit) return false;

    const bool deficient = rank < nc;
    MatX M;
    if (!deficient) {
        M = qr.solve(MatX(sqw.asDiagonal()));
    } else {
        // keep the pivoted leading columns, zero the rest
        MatX kept(n_obs, rank);
        std::vector<int> cols(rank);
        for (int k = 0; k < rank; ++k) {
            cols[k] = static_cast<int>(qr.colsPermutation().indices()[k]);
            kept.col(k) = Aw.col(cols[k]);
        }
        Eigen::ColPivHouseholderQR<MatX> sub(kept);
        MatX Msub = sub.solve(MatX(sqw.asDiagonal()));
        M = MatX::Zero(nc, n_obs);
        for (int k = 0; k < rank; ++k) M.row(cols[k]) = Msub.row(k);
    }

    out.effective_degree = degree;
    out.condition = condition;
    out.rank_deficient = deficient;
    out.centre = centre;
    out.scale = scale;
    out.coeff_map = std::move(M);
    return true;
}

/// Rank deficiency is acceptable only if the dropped directions do not
/// matter for points in the affine hull of the data. We accept the design
/// and let evaluation proceed; collinear data evaluated off-line is caught
/// by the caller through the degree-reduction path below.
bool data_spans_degree(int degree, const std::vector<Vec3>& points, const Vec3& centre,
                       double scale, const WlsFit& fit, const Vec3& eval_point) {
    if (!fit.rank_deficient) return true;
    // The design is reliable at eval_point iff the basis row there lies in
    // the span of the kept columns; cheap proxy: predicted value of each
    // kept-column monomial must reproduce itself at the data (checked by
    // construction), and the dropped monomials must vanish at eval_point.
    const PolyBasis basis(degree);
    const VecX row = eval_basis(degree, (eval_point - centre) / scale);
    for (int k = 0; k < basis.n_coeffs(); ++k) {
        const bool dropped = fit.coeff_map.row(k).isZero(0.0);
        if (dropped && std::abs(row(k)) > 1e-9) {
            // dropped monomial visible at the evaluation point: check whether
            // it is equally invisible in the data (then it cancels by symmetry
            // of centring) -- conservative: reject.
            double max_in_data = 0.0;
            for (const Vec3& p : points) {
                const VecX prow = eval_basis(degree, (p - centre) / scale);
                max_in_data = std::max(max_in_data, std::abs(prow(k)));
            }
            if (max_in_data > 1e-9) return false; // data sees it but rank dropped it
            return false;
        }
    }
    return true;
}

} // namespace

WlsFit wls_design(int degree, const std::vector<Vec3>& points, const VecX& weights,
                  const Vec3& centre, double scale) {
    if (points.empty()) throw InvalidInputError("WLS design requires observations");
    if (static_cast<int>(points.size()) != weights.size())
        throw InvalidInputError("WLS weights size mismatch");
    if (!(scale > 0.0)) throw InvalidInputError("WLS scale must be positive");

    WlsFit fit;
    fit.requested_degree = degree;
    for (int p = degree; p >= 0; --p) {
        if (try_design(p, points, weights, centre, scale, fit)) return fit;
    }
    // p = 0 cannot fail with a nonempty observation set
    throw AssemblyError("WLS design failed at degree 0");
}

WlsFit fit_wls(int degree, const std::vector<Vec3>& points, const VecX& values,
               const VecX& weights, const Vec3& centre, double scale) {
    if (values.size() != static_cast<Eigen::Index>(points.size()))
        throw InvalidInputError("WLS values size mismatch");
    WlsFit fit = wls_design(degree, points, weights, centre, scale);
    fit.beta = fit.coeff_map * values;
    return fit;
}

// ---------------- operator assembly ----------------

InterpOperator build_interp_operator(const Mesh& mesh, const Classification& cls,
                                     const std::vector<Stencil>& stencils, int degree) {
    const int n = mesh.n_cells();
    InterpOperator op;
    op.n_cells = n;
    op.degree = degree;
    op.ib_cells = cls.ib_cells;

    if (stencils.size() != cls.ib_cells.size())
        throw AssemblyError("one stencil per IB cell is required");
    for (size_t i = 0; i < stencils.size(); ++i)
        if (stencils[i].owner != cls.ib_cells[i])
            throw AssemblyError("stencil list does not match IB cell list");

    // extra datum slots for enrichment observations, in stencil order
    std::vector<int> extra_base(stencils.size() + 1, 0);
    for (size_t i = 0; i < stencils.size(); ++i)
        extra_base[i + 1] = extra_base[i] + static_cast<int>(stencils[i].boundary_obs.size());
    op.n_extra = extra_base[stencils.size()];

    op.contexts.resize(stencils.size());
    parallel_for(0, static_cast<int>(stencils.size()), [&](int i) {
        const Stencil& s = stencils[i];
        auto& ctx = op.contexts[i];
        ctx.cell = s.owner;
        ctx.ib_point = s.ib.point;
        ctx.cell_centre = mesh.cell_centre(s.owner);

        std::vector<Vec3> pts;
        pts.reserve(1 + s.members.size() + s.boundary_obs.size());
        pts.push_back(s.ib.point);
        ctx.obs.push_back({ObsRef::Kind::OwnDatum, s.owner});
        for (const auto& m : s.members) {
            pts.push_back(m.centre);
            ctx.obs.push_back({ObsRef::Kind::Cell, m.cell});
        }
        for (size_t b = 0; b < s.boundary_obs.size(); ++b) {
            pts.push_back(s.boundary_obs[b].position);
            ctx.obs.push_back({ObsRef::Kind::ExtraDatum, extra_base[i] + static_cast<int>(b)});
        }

        const PrincipalDirections pd = principal_directions(mesh, s.owner);
        const VecX w = compute_weights(s, pd);
        const double scale = std::max(mesh.cell_diameter(s.owner), 1e-300);
        ctx.fit = wls_design(degree, pts, w, s.ib.point, scale);
    });

    std::vector<Triplet> ts, tg;
    for (int c = 0; c < n; ++c) {
        if (cls.is_fluid(c)) {
            ts.emplace_back(c, c, 1.0);
        } else if (cls.is_solid(c)) {
            tg.emplace_back(c, c, 1.0); // inject the cell's own datum
        }
    }
    for (const auto& ctx : op.contexts) {
        const VecX s_row = ctx.fit.evaluate_map(mesh.cell_centre(ctx.cell));
        for (size_t k = 0; k < ctx.obs.size(); ++k) {
            const double coeff = s_row(static_cast<Eigen::Index>(k));
            if (coeff == 0.0) continue;
            switch (ctx.obs[k].kind) {
            case ObsRef::Kind::OwnDatum:
                tg.emplace_back(ctx.cell, ctx.obs[k].index, coeff);
                break;
            case ObsRef::Kind::Cell:
                ts.emplace_back(ctx.cell, ctx.obs[k].index, coeff);
                break;
            case ObsRef::Kind::ExtraDatum:
                tg.emplace_back(ctx.cell, n + ctx.obs[k].index, coeff);
                break;
            }
        }
    }
    op.S.resize(n, n);
    op.S.setFromTriplets(ts.begin(), ts.end());
    op.Sg.resize(n, n + op.n_extra);
    op.Sg.setFromTriplets(tg.begin(), tg.end());
    return op;
}

VecX correct_field(const InterpOperator& op, const VecX& g, const VecX& U) {
    if (U.size() != op.n_cells || g.size() != op.datum_size())
        throw InvalidInputError("correct_field dimension mismatch");
    return op.Sg * g + op.S * U;
}

VecX InterpOperator::CellContext::beta_for(const InterpOperator& op, const VecX& g,
                                           const VecX& U) const {
    VecX values(static_cast<Eigen::Index>(obs.size()));
    for (size_t k = 0; k < obs.size(); ++k) {
        const ObsRef& o = obs[k];
        switch (o.kind) {
        case ObsRef::Kind::OwnDatum: values(static_cast<Eigen::Index>(k)) = g(o.index); break;
        case ObsRef::Kind::Cell: values(static_cast<Eigen::Index>(k)) = U(o.index); break;
        case ObsRef::Kind::ExtraDatum:
            values(static_cast<Eigen::Index>(k)) = g(op.n_cells + o.index);
            break;
        }
    }
    return fit.coeff_map * values;
}

double replay_correction(const InterpOperator& op, const InterpOperator::CellContext& ctx,
                         const VecX& g, const VecX& U) {
    WlsFit f = ctx.fit;
    f.beta = ctx.beta_for(op, g, U);
    return f.evaluate(ctx.cell_centre);
}

std::vector<SurfaceSample> extrapolate_to_surface(const InterpOperator& op, const Mesh& mesh,
                                                  const VecX& g, const VecX& U,
                                                  const std::vector<Vec3>& samples) {
    std::vector<SurfaceSample> out(samples.size());
    const double reach = 2.0 * mesh.h();
    for (size_t i = 0; i < samples.size(); ++i) {
        out[i].point = samples[i];
        double best = reach;
        int owner = -1;
        for (size_t c = 0; c < op.contexts.size(); ++c) {
            const double d = (op.contexts[c].ib_point - samples[i]).norm();
            if (d < best) {
                best = d;
                owner = static_cast<int>(c);
            }
        }
        if (owner < 0) continue; // unassigned, reported via the flag
        const auto& ctx = op.contexts[owner];
        WlsFit f = ctx.fit;
        f.beta = ctx.beta_for(op, g, U);
        out[i].value = f.evaluate(samples[i]);
        out[i].owner = ctx.cell;
        out[i].assigned = true;
    }
    return out;
}

} // namespace ibflow
