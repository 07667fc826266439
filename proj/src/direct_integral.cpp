#include "lochs/direct_integral.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lochs {

std::size_t FiberFamily::fiber_dim(const std::string& point, std::size_t level) const {
    const auto it = fiber_dims.find(point);
    if (it == fiber_dims.end()) return 0;
    if (level == 0 || level > it->second.size())
        throw InvalidArgument("fiber level " + std::to_string(level) + " out of range");
    return it->second[level - 1];
}

const LevelLayout::Slot* LevelLayout::find(const std::string& point) const {
    for (const auto& s : slots)
        if (s.point == point) return &s;
    return nullptr;
}

const LevelLayout& DirectIntegralSpace::layout(std::size_t level) const {
    if (level == 0 || level > layouts_.size())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    return layouts_[level - 1];
}

const CMatrix& DirectIntegralSpace::to_chain_perm(std::size_t level) const {
    if (level == 0 || level > perms_.size())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    return perms_[level - 1];
}

std::vector<std::string> DirectIntegralSpace::active_points(std::size_t level) const {
    std::vector<std::string> pts;
    for (const auto& s : layout(level).slots) pts.push_back(s.point);
    return pts;
}

DirectIntegralSpace build_direct_integral(const FiberFamily& fibers) {
    const auto& space = fibers.space;
    const std::size_t levels = space.level_count();
    if (levels == 0) throw InvalidFibers("measure space has no levels");

    std::set<std::string> known(space.limit.points.begin(), space.limit.points.end());
    std::map<std::string, std::size_t> birth_level; // first level containing the point
    for (std::size_t li = levels; li-- > 0;)
        for (const auto& p : space.measures.chain.levels[li].points) birth_level[p] = li + 1;

    for (const auto& [p, dims] : fibers.fiber_dims) {
        if (!known.count(p)) throw InvalidFibers("fiber on unknown point '" + p + "'");
        if (dims.size() != levels)
            throw InvalidFibers("fiber of '" + p + "' has " + std::to_string(dims.size()) +
                                " levels, expected " + std::to_string(levels));
        for (std::size_t i = 1; i < levels; ++i)
            if (dims[i] < dims[i - 1])
                throw InvalidFibers("fiber of '" + p + "' shrinks at level " + std::to_string(i + 1));
        for (std::size_t i = 0; i + 1 < birth_level.at(p); ++i)
            if (dims[i] != 0)
                throw InvalidFibers("fiber of '" + p + "' is nonzero before the point appears");
    }

    DirectIntegralSpace out;
    out.fibers_ = fibers;

    for (std::size_t li = 1; li <= levels; ++li) {
        LevelLayout lay;
        for (const auto& p : space.level_points(li)) {
            const std::size_t d = fibers.fiber_dim(p, li);
            if (d == 0 || space.weight(p) <= Rat(0)) continue;
            LevelLayout::Slot s;
            s.point = p;
            s.offset = lay.total_dim;
            s.dim = d;
            s.sqrt_weight = std::sqrt(boost::rational_cast<double>(space.weight(p)));
            lay.total_dim += d;
            lay.slots.push_back(std::move(s));
        }
        out.layouts_.push_back(std::move(lay));
    }

    // Chain layout: coordinates (p, j) sorted by birth of the coordinate,
    // then by the point's first appearance, then by j. The level-n slice of
    // this order is exactly its first dim(H_n) entries.
    std::map<std::string, std::size_t> porder;
    for (std::size_t i = 0; i < space.limit.points.size(); ++i) porder[space.limit.points[i]] = i;
    struct Coord {
        std::size_t birth, point_order, j;
        std::string point;
    };
    std::vector<Coord> coords;
    for (const auto& p : space.limit.points) {
        const std::size_t top = fibers.fiber_dim(p, levels);
        if (top == 0 || space.weight(p) <= Rat(0)) continue;
        for (std::size_t j = 0; j < top; ++j) {
            std::size_t birth = levels;
            while (birth > 1 && fibers.fiber_dim(p, birth - 1) > j) --birth;
            // birth is now the first level with fiber_dim > j
            coords.push_back({birth, porder.at(p), j, p});
        }
    }
    std::sort(coords.begin(), coords.end(), [](const Coord& a, const Coord& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.point_order != b.point_order) return a.point_order < b.point_order;
        return a.j < b.j;
    });

    for (std::size_t li = 1; li <= levels; ++li) {
        const LevelLayout& lay = out.layouts_[li - 1];
        out.chain_.dims.push_back(lay.total_dim);
        CMatrix perm(lay.total_dim, lay.total_dim);
        std::size_t k = 0;
        for (const auto& c : coords) {
            if (c.birth > li) continue;
            const auto* slot = lay.find(c.point);
            if (!slot || c.j >= slot->dim)
                throw InvalidFibers("internal layout mismatch at level " + std::to_string(li));
            perm(k, slot->offset + c.j) = 1.0;
            ++k;
        }
        if (k != lay.total_dim)
            throw InvalidFibers("internal layout count mismatch at level " + std::to_string(li));
        out.perms_.push_back(std::move(perm));
    }
    return out;
}

namespace {

void check_section(const DirectIntegralSpace& s, const Section& u) {
    if (u.level == 0 || u.level > s.level_count())
        throw SpaceMismatch("section level " + std::to_string(u.level) + " out of range");
    const LevelLayout& lay = s.layout(u.level);
    for (const auto& [p, v] : u.values) {
        const auto* slot = lay.find(p);
        if (!slot)
            throw SpaceMismatch("section value on point '" + p + "' which is inactive at level " +
                                std::to_string(u.level));
        if (v.size() != slot->dim)
            throw SpaceMismatch("section value on '" + p + "' has length " + std::to_string(v.size()) +
                                ", fiber dimension is " + std::to_string(slot->dim));
    }
}

} // namespace

CVec DirectIntegralSpace::reindex(std::size_t level, const Section& u) const {
    check_section(*this, u);
    if (u.level != level)
        throw SpaceMismatch("section lives at level " + std::to_string(u.level) + ", not " +
                            std::to_string(level));
    const LevelLayout& lay = layout(level);
    CVec x(lay.total_dim, 0.0);
    for (const auto& s : lay.slots) {
        const auto it = u.values.find(s.point);
        if (it == u.values.end()) continue;
        for (std::size_t j = 0; j < s.dim; ++j) x[s.offset + j] = s.sqrt_weight * it->second[j];
    }
    return x;
}

Section DirectIntegralSpace::unreindex(std::size_t level, const CVec& x) const {
    const LevelLayout& lay = layout(level);
    if (x.size() != lay.total_dim)
        throw SpaceMismatch("coordinate vector length " + std::to_string(x.size()) +
                            ", level dimension is " + std::to_string(lay.total_dim));
    Section u;
    u.level = level;
    for (const auto& s : lay.slots) {
        CVec v(s.dim);
        for (std::size_t j = 0; j < s.dim; ++j) v[j] = x[s.offset + j] / s.sqrt_weight;
        u.values[s.point] = std::move(v);
    }
    return u;
}

CMatrix DirectIntegralSpace::embedding(std::size_t m, std::size_t n) const {
    if (m > n) throw InvalidArgument("embedding needs m <= n");
    const LevelLayout& lm = layout(m);
    const LevelLayout& ln = layout(n);
    CMatrix e(ln.total_dim, lm.total_dim);
    for (const auto& sm : lm.slots) {
        const auto* sn = ln.find(sm.point);
        if (!sn || sn->dim < sm.dim)
            throw InvalidFibers("fiber of '" + sm.point + "' vanishes or shrinks between levels");
        for (std::size_t j = 0; j < sm.dim; ++j) e(sn->offset + j, sm.offset + j) = 1.0;
    }
    return e;
}

namespace {

// zero-padded fiber value of a section at a (>= its own) level
CVec fiber_value_at(const DirectIntegralSpace& s, const Section& u, const std::string& p,
                    std::size_t level) {
    CVec v(s.fibers().fiber_dim(p, level), 0.0);
    const auto it = u.values.find(p);
    if (it != u.values.end())
        std::copy(it->second.begin(), it->second.end(), v.begin());
    return v;
}

} // namespace

cplx section_inner(const Section& u, const Section& v, const DirectIntegralSpace& s) {
    check_section(s, u);
    check_section(s, v);
    const std::size_t level = std::max(u.level, v.level);
    cplx total = 0.0;
    for (const auto& slot : s.layout(level).slots) {
        const CVec uv = fiber_value_at(s, u, slot.point, level);
        const CVec vv = fiber_value_at(s, v, slot.point, level);
        total += slot.sqrt_weight * slot.sqrt_weight * vdot(uv, vv);
    }
    return total;
}

std::map<std::string, cplx> density_function(const Section& u, const Section& v,
                                             const DirectIntegralSpace& s) {
    check_section(s, u);
    check_section(s, v);
    const std::size_t level = std::max(u.level, v.level);
    std::map<std::string, cplx> out;
    for (const auto& slot : s.layout(level).slots)
        out[slot.point] = vdot(fiber_value_at(s, u, slot.point, level),
                               fiber_value_at(s, v, slot.point, level));
    return out;
}

std::map<std::string, cplx> pairing_function(const Section& u,
                                             const std::map<std::string, CVec>& family,
                                             const DirectIntegralSpace& s) {
    check_section(s, u);
    const std::size_t top = s.level_count();
    for (const auto& [p, v] : family) {
        const auto it = s.fibers().fiber_dims.find(p);
        const std::size_t cap = (it == s.fibers().fiber_dims.end()) ? 0 : it->second.back();
        if (v.size() > cap)
            throw UnsupportedFamily("family vector on '" + p + "' has length " +
                                    std::to_string(v.size()) + ", top fiber dimension is " +
                                    std::to_string(cap));
    }
    std::map<std::string, cplx> out;
    for (const auto& slot : s.layout(top).slots) {
        CVec fv(slot.dim, 0.0);
        const auto it = family.find(slot.point);
        if (it != family.end()) std::copy(it->second.begin(), it->second.end(), fv.begin());
        out[slot.point] = vdot(fv, fiber_value_at(s, u, slot.point, top));
    }
    return out;
}

Section assemble_section(const DirectIntegralSpace& s,
                         const std::map<std::string, CVec>& family, std::size_t level) {
    if (level == 0 || level > s.level_count())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    const LevelLayout& lay = s.layout(level);
    Section u;
    u.level = level;
    for (const auto& [p, v] : family) {
        const auto* slot = lay.find(p);
        if (!slot)
            throw NotInFiber("point '" + p + "' carries no fiber at level " + std::to_string(level));
        if (v.size() > slot->dim)
            throw NotInFiber("vector on '" + p + "' has length " + std::to_string(v.size()) +
                             ", fiber dimension at level " + std::to_string(level) + " is " +
                             std::to_string(slot->dim));
        CVec padded(slot->dim, 0.0);
        std::copy(v.begin(), v.end(), padded.begin());
        u.values[p] = std::move(padded);
    }
    return u;
}

} // namespace lochs
