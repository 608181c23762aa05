#include "dqlab/serialize.hpp"

#include "dqlab/errors.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

namespace dqlab {

namespace {

const json& field_of(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorKind::kSchema, "missing field '" + where + "." + key + "'");
    return j.at(key);
}

std::vector<Interval> intervals_from(const json& j, const std::string& field) {
    if (!j.is_array()) throw Error(ErrorKind::kSchema, "field '" + field + "' must be an array");
    std::vector<Interval> v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(interval_from_json(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

}  // namespace

json to_json(const Rat& r) { return r.str(); }
json to_json(const Interval& i) { return json::array({i.lo.str(), i.hi.str()}); }
json to_json(const Enclosure& e) { return {{"mid", e.mid.str()}, {"rad", e.rad.str()}}; }

json to_json(const IntervalSet& s) {
    json iv = json::array(), pu = json::array();
    for (const auto& i : s.intervals()) iv.push_back(to_json(i));
    for (const auto& p : s.punctures()) pu.push_back(p.str());
    return {{"intervals", iv}, {"punctures", pu}};
}

json to_json(const Piece& p) {
    return {{"lo", p.domain.lo.str()}, {"hi", p.domain.hi.str()}, {"y_start", p.y_start.str()},
            {"y_end", p.y_end.str()},   {"shape", to_string(p.shape)}, {"height", p.height.str()}};
}

json to_json(const PiecewiseFn& f) {
    json arr = json::array();
    for (const auto& p : f.pieces()) arr.push_back(to_json(p));
    return {{"pieces", arr}};
}

json to_json(const Rect& r) { return json::array({r.x.lo.str(), r.x.hi.str(), r.y.lo.str(), r.y.hi.str()}); }

json to_json(const StaircaseLedger& ledger) {
    json levels = json::array();
    for (std::size_t k = 0; k < ledger.levels.size(); ++k) {
        const Level& l = ledger.levels[k];
        json rects = json::array(), conn = json::array();
        for (const auto& r : l.rects) rects.push_back(to_json(r));
        for (const auto& p : l.connectors) conn.push_back(to_json(p));
        levels.push_back({{"k", l.k},
                          {"v", l.v.str()},
                          {"h", l.h.str()},
                          {"s", l.s.str()},
                          {"t", l.t.str()},
                          {"x_measure", ledger.x_measures[k].str()},
                          {"y_bound", ledger.y_measure_bounds[k].str()},
                          {"rects", rects},
                          {"connectors", conn}});
    }
    LimitBounds lim = x_limit_bounds(ledger);
    return {{"gap_convention", to_string(ledger.convention)},
            {"depth", ledger.depth()},
            {"x_limit", {{"lo", lim.lo.str()}, {"hi", lim.hi.str()}}},
            {"levels", levels}};
}

json to_json(const Witness& w) {
    return {{"theta", w.theta.str()},       {"x_minus", w.x_minus.str()},
            {"x_plus", w.x_plus.str()},     {"bracket", to_json(w.bracket)},
            {"residual_bound", w.residual_bound.str()},
            {"c_minus", to_json(w.c_minus)}, {"c_plus", to_json(w.c_plus)},
            {"covered", to_json(w.covered)}};
}

json to_json(const DQCertificate& c) {
    json ws = json::array();
    for (const auto& w : c.witnesses) ws.push_back(to_json(w));
    return {{"normalization", {{"a", c.a.str()}, {"b", c.b.str()}, {"c", c.c.str()}, {"d", c.d.str()}}},
            {"center_pair", json::array({c.center_pair.first.str(), c.center_pair.second.str()})},
            {"center_dq", to_json(c.center_dq)},
            {"certified_interval", to_json(c.certified_interval)},
            {"certified_g", to_json(c.certified_g)},
            {"i_minus", to_json(c.i_minus)},
            {"i_plus", to_json(c.i_plus)},
            {"m", c.m.str()},
            {"M", c.M.str()},
            {"density_threshold", c.density_threshold.str()},
            {"density_minus", c.density_minus.str()},
            {"density_plus", c.density_plus.str()},
            {"image_mismatch", c.image_mismatch.str()},
            {"theta_sup", c.theta_sup.str()},
            {"theta_max", c.theta_max.str()},
            {"grid", c.grid},
            {"witnesses", ws}};
}

Rat rat_from_json(const json& j, const std::string& field) {
    if (j.is_string()) {
        try {
            return Rat::parse(j.get<std::string>());
        } catch (const Error&) {
            throw Error(ErrorKind::kSchema, "field '" + field + "' is not a rational: " + j.dump());
        }
    }
    if (j.is_number_integer()) return Rat(j.get<long long>());
    throw Error(ErrorKind::kSchema, "field '" + field + "' must be a \"p/q\" string");
}

Interval interval_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorKind::kSchema, "field '" + field + "' must be a [lo, hi] pair");
    return {rat_from_json(j[0], field + "[0]"), rat_from_json(j[1], field + "[1]")};
}

Enclosure enclosure_from_json(const json& j, const std::string& field) {
    Enclosure e{rat_from_json(field_of(j, "mid", field), field + ".mid"),
                rat_from_json(field_of(j, "rad", field), field + ".rad")};
    if (e.rad.sign() < 0) throw Error(ErrorKind::kSchema, "field '" + field + ".rad' is negative");
    return e;
}

IntervalSet interval_set_from_json(const json& j, const std::string& field) {
    if (j.is_object() && j.contains("fat_cantor")) {
        const json& d = j.at("fat_cantor");
        if (!d.is_number_integer() || d.get<int>() < 0 || d.get<int>() > 24)
            throw Error(ErrorKind::kSchema, "field '" + field + ".fat_cantor' must be an integer in 0..24");
        return fat_cantor(d.get<int>());
    }
    IntervalSet s;
    try {
        s = IntervalSet::normalize(intervals_from(field_of(j, "intervals", field), field + ".intervals"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::kMalformedInterval)
            throw Error(ErrorKind::kSchema, "field '" + field + ".intervals': " + e.what());
        throw;
    }
    if (j.contains("punctures")) {
        const json& p = j.at("punctures");
        if (!p.is_array()) throw Error(ErrorKind::kSchema, "field '" + field + ".punctures' must be an array");
        std::vector<Rat> pts;
        for (std::size_t i = 0; i < p.size(); ++i)
            pts.push_back(rat_from_json(p[i], field + ".punctures[" + std::to_string(i) + "]"));
        s = minus_points(s, pts);
    }
    return s;
}

PiecewiseFn piecewise_from_json(const json& j, const std::string& field) {
    if (j.is_object() && j.contains("staircase")) {
        const json& st = j.at("staircase");
        const json& d = field_of(st, "depth", field + ".staircase");
        if (!d.is_number_integer() || d.get<int>() < 0 || d.get<int>() > 16)
            throw Error(ErrorKind::kSchema, "field '" + field + ".staircase.depth' must be an integer in 0..16");
        GapConvention c = GapConvention::kPaperLedger;
        if (st.contains("gap_convention")) {
            try {
                c = parse_gap_convention(st.at("gap_convention").get<std::string>());
            } catch (const std::exception&) {
                throw Error(ErrorKind::kSchema, "field '" + field + ".staircase.gap_convention' is invalid");
            }
        }
        return truncation(build_ledger(d.get<int>(), c), d.get<int>());
    }
    const json& arr = field_of(j, "pieces", field);
    if (!arr.is_array()) throw Error(ErrorKind::kSchema, "field '" + field + ".pieces' must be an array");
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = field + ".pieces[" + std::to_string(i) + "]";
        const json& pj = arr[i];
        Piece p;
        p.domain = {rat_from_json(field_of(pj, "lo", at), at + ".lo"), rat_from_json(field_of(pj, "hi", at), at + ".hi")};
        p.y_start = rat_from_json(field_of(pj, "y_start", at), at + ".y_start");
        p.y_end = rat_from_json(field_of(pj, "y_end", at), at + ".y_end");
        const json& sh = field_of(pj, "shape", at);
        if (!sh.is_string()) throw Error(ErrorKind::kSchema, "field '" + at + ".shape' must be a string");
        try {
            p.shape = parse_shape(sh.get<std::string>());
        } catch (const Error&) {
            throw Error(ErrorKind::kSchema, "field '" + at + ".shape' is not a known shape: " + sh.dump());
        }
        if (pj.contains("height")) p.height = rat_from_json(pj.at("height"), at + ".height");
        else if (p.shape == CurveShape::kCosFull)
            throw Error(ErrorKind::kSchema, "missing field '" + at + ".height' (required for COS_FULL)");
        else p.height = p.chord();
        pieces.push_back(std::move(p));
    }
    try {
        return PiecewiseFn(std::move(pieces));
    } catch (const Error& e) {
        throw Error(ErrorKind::kSchema, "field '" + field + ".pieces': " + e.what());
    }
}

DQCertificate certificate_from_json(const json& j) {
    DQCertificate c;
    const json& n = field_of(j, "normalization", "certificate");
    c.a = rat_from_json(field_of(n, "a", "normalization"), "normalization.a");
    c.b = rat_from_json(field_of(n, "b", "normalization"), "normalization.b");
    c.c = rat_from_json(field_of(n, "c", "normalization"), "normalization.c");
    c.d = rat_from_json(field_of(n, "d", "normalization"), "normalization.d");
    Interval cp = interval_from_json(field_of(j, "center_pair", "certificate"), "center_pair");
    c.center_pair = {cp.lo, cp.hi};
    c.center_dq = enclosure_from_json(field_of(j, "center_dq", "certificate"), "center_dq");
    c.certified_interval = interval_from_json(field_of(j, "certified_interval", "certificate"), "certified_interval");
    c.certified_g = interval_from_json(field_of(j, "certified_g", "certificate"), "certified_g");
    c.i_minus = interval_from_json(field_of(j, "i_minus", "certificate"), "i_minus");
    c.i_plus = interval_from_json(field_of(j, "i_plus", "certificate"), "i_plus");
    for (auto [key, dst] : {std::pair<const char*, Rat*>{"m", &c.m}, {"M", &c.M},
                            {"density_threshold", &c.density_threshold}, {"density_minus", &c.density_minus},
                            {"density_plus", &c.density_plus}, {"image_mismatch", &c.image_mismatch},
                            {"theta_sup", &c.theta_sup}, {"theta_max", &c.theta_max}})
        *dst = rat_from_json(field_of(j, key, "certificate"), key);
    const json& g = field_of(j, "grid", "certificate");
    if (!g.is_number_integer()) throw Error(ErrorKind::kSchema, "field 'grid' must be an integer");
    c.grid = g.get<int>();
    const json& ws = field_of(j, "witnesses", "certificate");
    if (!ws.is_array()) throw Error(ErrorKind::kSchema, "field 'witnesses' must be an array");
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const std::string at = "witnesses[" + std::to_string(i) + "]";
        const json& wj = ws[i];
        Witness w;
        w.theta = rat_from_json(field_of(wj, "theta", at), at + ".theta");
        w.x_minus = rat_from_json(field_of(wj, "x_minus", at), at + ".x_minus");
        w.x_plus = rat_from_json(field_of(wj, "x_plus", at), at + ".x_plus");
        w.bracket = interval_from_json(field_of(wj, "bracket", at), at + ".bracket");
        w.residual_bound = rat_from_json(field_of(wj, "residual_bound", at), at + ".residual_bound");
        w.c_minus = interval_from_json(field_of(wj, "c_minus", at), at + ".c_minus");
        w.c_plus = interval_from_json(field_of(wj, "c_plus", at), at + ".c_plus");
        w.covered = interval_from_json(field_of(wj, "covered", at), at + ".covered");
        c.witnesses.push_back(std::move(w));
    }
    return c;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kSchema, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

PiecewiseFn load_function(const std::filesystem::path& path) {
    json j = read_json_file(path);
    return piecewise_from_json(j.contains("function") ? j.at("function") : j);
}

IntervalSet load_set(const std::filesystem::path& path) {
    json j = read_json_file(path);
    return interval_set_from_json(j.contains("set") ? j.at("set") : j);
}

std::string geometry_csv(const StaircaseLedger& ledger) {
    std::ostringstream os;
    os << "level,index,x_lo,x_hi,y_lo,y_hi\n";
    for (const auto& l : ledger.levels)
        for (std::size_t i = 0; i < l.rects.size(); ++i) {
            const Rect& r = l.rects[i];
            os << l.k << ',' << i << ',' << r.x.lo << ',' << r.x.hi << ',' << r.y.lo << ',' << r.y.hi << '\n';
        }
    return os.str();
}

std::string dqcloud_csv(const DQCloud& cloud) {
    std::ostringstream os;
    os << "x1,x2,dq_lo,dq_hi\n";
    for (const auto& s : cloud.samples)
        os << s.x1 << ',' << s.x2 << ',' << s.dq_value.lo() << ',' << s.dq_value.hi() << '\n';
    return os.str();
}

json to_json(const DQCloud& cloud) {
    json arr = json::array();
    for (const auto& s : cloud.samples)
        arr.push_back({{"x1", s.x1.str()}, {"x2", s.x2.str()}, {"dq", to_json(s.dq_value)},
                       {"d1", to_json(s.d1)}, {"d2", to_json(s.d2)}});
    const auto& m = cloud.summary;
    return {{"summary",
             {{"min", m.min.str()}, {"max", m.max.str()}, {"largest_gap", to_json(m.largest_gap)},
              {"mvt", json::array({m.mvt.lo.str(), m.mvt.hi.str()})}, {"outside_mvt", m.outside_mvt}}},
            {"samples", arr}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::kIo, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::kIo, "cannot move output into '" + path.string() + "'");
    }
}

}  // namespace dqlab
