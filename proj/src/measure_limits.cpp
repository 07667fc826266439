#include "lochs/measure_limits.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace lochs {

Rat parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            std::size_t used = 0;
            const long long p = std::stoll(text, &used);
            if (used != text.size()) throw ParseError("trailing characters in rational '" + text + "'");
            return Rat(p);
        }
        std::size_t used = 0;
        const std::string ps = text.substr(0, slash), qs = text.substr(slash + 1);
        const long long p = std::stoll(ps, &used);
        if (used != ps.size()) throw ParseError("bad numerator in rational '" + text + "'");
        const long long q = std::stoll(qs, &used);
        if (used != qs.size()) throw ParseError("bad denominator in rational '" + text + "'");
        if (q == 0) throw ParseError("zero denominator in rational '" + text + "'");
        return Rat(p, q);
    } catch (const std::invalid_argument&) {
        throw ParseError("unparseable rational '" + text + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("rational out of range '" + text + "'");
    }
}

std::string format_rational(const Rat& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << "/" << r.denominator();
    return os.str();
}

namespace {

std::string join_block(const std::vector<std::string>& block) {
    std::string s = "{";
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (i) s += ",";
        s += block[i];
    }
    return s + "}";
}

void check_space(const FiniteMeasurableSpace& sp, std::size_t level, ChainReport& rep) {
    std::set<std::string> pts(sp.points.begin(), sp.points.end());
    auto add = [&](std::vector<std::string> block, const std::string& msg) {
        rep.pass = false;
        rep.violations.push_back({"space", level, level, std::move(block), msg});
    };
    if (pts.size() != sp.points.size()) add(sp.points, "duplicate point identifiers");
    std::set<std::string> covered;
    for (const auto& b : sp.blocks) {
        if (b.empty()) {
            add(b, "empty block");
            continue;
        }
        for (const auto& p : b) {
            if (!pts.count(p)) add(b, "block uses unknown point '" + p + "'");
            if (!covered.insert(p).second) add(b, "point '" + p + "' appears in two blocks");
        }
    }
    for (const auto& p : sp.points)
        if (!covered.count(p)) add({p}, "point '" + p + "' not covered by any block");
}

std::set<std::string> block_set(const std::vector<std::string>& b) {
    return std::set<std::string>(b.begin(), b.end());
}

} // namespace

ChainReport validate_chain(const MeasurableChain& chain) {
    ChainReport rep;
    if (chain.levels.empty()) {
        rep.pass = false;
        rep.violations.push_back({"space", 0, 0, {}, "chain has no levels"});
        return rep;
    }
    for (std::size_t i = 0; i < chain.levels.size(); ++i)
        check_space(chain.levels[i], i + 1, rep);
    if (!rep.pass) return rep;

    for (std::size_t mi = 0; mi < chain.levels.size(); ++mi) {
        const auto ptsm = block_set(chain.levels[mi].points);
        std::vector<std::set<std::string>> mblocks;
        for (const auto& b : chain.levels[mi].blocks) mblocks.push_back(block_set(b));
        for (std::size_t ni = mi + 1; ni < chain.levels.size(); ++ni) {
            const auto& ln = chain.levels[ni];
            const auto ptsn = block_set(ln.points);
            for (const auto& p : ptsm)
                if (!ptsn.count(p)) {
                    rep.pass = false;
                    rep.violations.push_back({"nesting", mi + 1, ni + 1, {p},
                                              "point '" + p + "' disappears between levels"});
                }
            if (!rep.pass) return rep;
            for (const auto& b : ln.blocks) {
                std::set<std::string> tr;
                for (const auto& p : b)
                    if (ptsm.count(p)) tr.insert(p);
                if (tr.empty()) continue;
                if (std::find(mblocks.begin(), mblocks.end(), tr) == mblocks.end()) {
                    rep.pass = false;
                    rep.violations.push_back(
                        {"trace", mi + 1, ni + 1, b,
                         "trace of block " + join_block(b) + " on level " +
                             std::to_string(mi + 1) + " is not a block there"});
                    return rep;
                }
            }
        }
    }
    return rep;
}

bool LimitSigmaAlgebra::contains(const std::set<std::string>& e) const {
    const std::set<std::string> all(points.begin(), points.end());
    for (const auto& p : e)
        if (!all.count(p)) return false;
    for (const auto& atom : atoms) {
        std::size_t in = 0;
        for (const auto& p : atom)
            if (e.count(p)) ++in;
        if (in != 0 && in != atom.size()) return false;
    }
    return true;
}

std::size_t LimitSigmaAlgebra::atom_index(const std::string& point) const {
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (const auto& p : atoms[i])
            if (p == point) return i;
    throw UnknownName("point '" + point + "' not in the limit space");
}

LimitSigmaAlgebra limit_sigma_algebra(const MeasurableChain& chain) {
    const ChainReport rep = validate_chain(chain);
    if (!rep.pass)
        throw InvalidChain(rep.violations.empty() ? "invalid chain" : rep.violations.front().message);

    LimitSigmaAlgebra out;
    std::map<std::string, std::size_t> index;
    for (const auto& lvl : chain.levels)
        for (const auto& p : lvl.points)
            if (!index.count(p)) {
                index[p] = out.points.size();
                out.points.push_back(p);
            }

    std::vector<std::size_t> parent(out.points.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& lvl : chain.levels)
        for (const auto& b : lvl.blocks)
            for (std::size_t i = 1; i < b.size(); ++i)
                parent[find(index[b[i]])] = find(index[b[0]]);

    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t i = 0; i < out.points.size(); ++i)
        groups[find(i)].push_back(out.points[i]);
    // map keys are root indices; roots ordered by index order = first appearance
    std::vector<std::pair<std::size_t, std::vector<std::string>>> ordered;
    for (auto& [root, pts] : groups) {
        std::size_t first = index[pts.front()];
        for (const auto& p : pts) first = std::min(first, index[p]);
        ordered.emplace_back(first, std::move(pts));
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [first, pts] : ordered) {
        std::sort(pts.begin(), pts.end(),
                  [&](const std::string& a, const std::string& b) { return index[a] < index[b]; });
        out.atoms.push_back(std::move(pts));
    }
    return out;
}

PointMap glue_measurable_maps(const MeasurableChain& chain,
                              const FiniteMeasurableSpace& target,
                              const std::vector<PointMap>& maps) {
    const ChainReport rep = validate_chain(chain);
    if (!rep.pass)
        throw InvalidChain(rep.violations.empty() ? "invalid chain" : rep.violations.front().message);
    {
        ChainReport trep;
        check_space(target, 0, trep);
        if (!trep.pass) throw InvalidArgument("target space: " + trep.violations.front().message);
    }
    if (maps.size() != chain.level_count())
        throw InvalidArgument("expected one map per level, got " + std::to_string(maps.size()));

    std::map<std::string, std::size_t> target_block;
    for (std::size_t bi = 0; bi < target.blocks.size(); ++bi)
        for (const auto& p : target.blocks[bi]) target_block[p] = bi;

    for (std::size_t li = 0; li < maps.size(); ++li) {
        const auto& lvl = chain.levels[li];
        const auto& f = maps[li];
        for (const auto& p : lvl.points)
            if (!f.count(p))
                throw InvalidArgument("level " + std::to_string(li + 1) + " map misses point '" + p + "'");
        for (const auto& [p, v] : f) {
            if (std::find(lvl.points.begin(), lvl.points.end(), p) == lvl.points.end())
                throw InvalidArgument("level " + std::to_string(li + 1) + " map names stray point '" + p + "'");
            if (!target_block.count(v))
                throw NotMeasurable("level " + std::to_string(li + 1) + " maps '" + p +
                                    "' to unknown target point '" + v + "'");
        }
        for (const auto& b : lvl.blocks) {
            const std::size_t tb = target_block.at(f.at(b.front()));
            for (const auto& p : b)
                if (target_block.at(f.at(p)) != tb)
                    throw NotMeasurable("level " + std::to_string(li + 1) + " map splits block " +
                                        join_block(b) + " across target blocks");
        }
    }

    for (std::size_t mi = 0; mi < maps.size(); ++mi)
        for (std::size_t ni = mi + 1; ni < maps.size(); ++ni)
            for (const auto& p : chain.levels[mi].points)
                if (maps[ni].at(p) != maps[mi].at(p))
                    throw IncompatibleFamily("maps at levels " + std::to_string(mi + 1) + " and " +
                                             std::to_string(ni + 1) + " disagree at point '" + p + "'");

    PointMap glued;
    for (std::size_t li = 0; li < maps.size(); ++li)
        for (const auto& p : chain.levels[li].points)
            if (!glued.count(p)) glued[p] = maps[li].at(p);
    return glued;
}

Rat MeasureChain::weight(const std::string& point) const {
    const auto it = weights.find(point);
    if (it == weights.end()) throw UnknownName("no weight for point '" + point + "'");
    return it->second;
}

ChainReport validate_measure_chain(const MeasureChain& mc) {
    ChainReport rep = validate_chain(mc.chain);
    if (!rep.pass) return rep;

    std::set<std::string> all;
    for (const auto& lvl : mc.chain.levels)
        for (const auto& p : lvl.points) all.insert(p);
    for (const auto& p : all) {
        const auto it = mc.weights.find(p);
        if (it == mc.weights.end()) {
            rep.pass = false;
            rep.violations.push_back({"weight", 0, 0, {p}, "point '" + p + "' has no weight"});
        } else if (it->second < Rat(0)) {
            rep.pass = false;
            rep.violations.push_back({"weight", 0, 0, {p},
                                      "point '" + p + "' has negative weight " + format_rational(it->second)});
        }
    }
    for (const auto& [p, w] : mc.weights)
        if (!all.count(p)) {
            rep.pass = false;
            rep.violations.push_back({"weight", 0, 0, {p}, "weight for unknown point '" + p + "'"});
        }
    if (!rep.pass) return rep;

    // A block that acquires points between levels m and n leaves the level-m
    // sigma-algebra, so projectivity of the level measures forces it to carry
    // zero mass at level m.
    const std::size_t levels = mc.chain.level_count();
    for (std::size_t mi = 0; mi < levels; ++mi)
        for (const auto& b : mc.chain.levels[mi].blocks) {
            const auto bs = block_set(b);
            bool grows = false;
            for (std::size_t ni = mi + 1; ni < levels && !grows; ++ni) {
                for (const auto& c : mc.chain.levels[ni].blocks) {
                    const auto cs = block_set(c);
                    if (cs.count(b.front())) {
                        if (cs != bs) grows = true;
                        break;
                    }
                }
            }
            if (grows) {
                Rat total(0);
                for (const auto& p : b) total += mc.weight(p);
                if (total != Rat(0)) {
                    rep.pass = false;
                    rep.violations.push_back(
                        {"projective", mi + 1, 0, b,
                         "block " + join_block(b) + " grows later but has mass " + format_rational(total)});
                }
            }
        }
    return rep;
}

Rat level_measure(const MeasureChain& mc, std::size_t level, const std::set<std::string>& e) {
    if (level == 0 || level > mc.chain.level_count())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    const auto& lvl = mc.chain.levels[level - 1];
    const auto pts = block_set(lvl.points);
    for (const auto& p : e)
        if (!pts.count(p))
            throw NotMeasurable("point '" + p + "' not at level " + std::to_string(level));
    for (const auto& b : lvl.blocks) {
        std::size_t in = 0;
        for (const auto& p : b)
            if (e.count(p)) ++in;
        if (in != 0 && in != b.size())
            throw NotMeasurable("set cuts block " + join_block(b) + " at level " + std::to_string(level));
    }
    Rat total(0);
    for (const auto& p : e) total += mc.weight(p);
    return total;
}

ExtRat limit_measure(const MeasureChain& mc, const std::set<std::string>& e) {
    const ChainReport rep = validate_measure_chain(mc);
    if (!rep.pass) throw InvalidChain(rep.violations.front().message);
    const LimitSigmaAlgebra sigma = limit_sigma_algebra(mc.chain);
    if (!sigma.contains(e))
        throw NotMeasurable("set is not in the limit sigma-algebra");
    ExtRat out;
    for (const auto& p : e) out.value += mc.weight(p);
    return out;
}

const std::vector<std::string>& LocallyStandardMeasureSpace::level_points(std::size_t level) const {
    if (level == 0 || level > level_count())
        throw InvalidArgument("level " + std::to_string(level) + " out of range");
    return measures.chain.levels[level - 1].points;
}

LocallyStandardMeasureSpace make_locally_standard(const MeasureChain& mc) {
    const ChainReport rep = validate_measure_chain(mc);
    if (!rep.pass) throw InvalidChain(rep.violations.front().message);
    LocallyStandardMeasureSpace sp;
    sp.measures = mc;
    sp.limit = limit_sigma_algebra(mc.chain);
    return sp;
}

} // namespace lochs
