#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ultrashift/ultrashift.hpp"

using json = nlohmann::ordered_json;
using namespace ultrashift;

namespace {

constexpr const char* kSchema = "ultrashift/1";
constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitUnknown = 2;

struct Bounds {
    Index length = 20;
    Index index = 50;
    Index rank = kDefaultMaxRank;
    Index depth = 3;
    Index sample = 8;
    Index coefficients = 4;
};

struct Options {
    std::string input;
    bool json = false;
    std::string output;
    std::string order = "canonical";
    Bounds bounds;
    // flags given on the command line override the environment
    std::optional<Index> length, index, rank, depth, sample, coefficients;
};

struct Failure {
    DiagnosticList diagnostics;
};

/// ULTRASHIFT_DEFAULT_BOUNDS="length=20,index=50,rank=100000,depth=3,sample=8,coefficients=4"
Bounds boundsFromEnvironment() {
    Bounds b;
    const char* env = std::getenv("ULTRASHIFT_DEFAULT_BOUNDS");
    if (!env || !*env) return b;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        std::string key = item.substr(0, eq);
        std::string val = eq == std::string::npos ? "" : item.substr(eq + 1);
        if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos)
            throw Failure{{{codes::kSyntax, "ULTRASHIFT_DEFAULT_BOUNDS: bad entry '" + item + "'", 0, 0}}};
        Index v = std::stoull(val);
        if (key == "length") b.length = v;
        else if (key == "index") b.index = v;
        else if (key == "rank") b.rank = v;
        else if (key == "depth") b.depth = v;
        else if (key == "sample") b.sample = v;
        else if (key == "coefficients") b.coefficients = v;
        else throw Failure{{{codes::kSyntax, "ULTRASHIFT_DEFAULT_BOUNDS: unknown key '" + key + "'", 0, 0}}};
    }
    return b;
}

void resolveBounds(Options& o) {
    o.bounds = boundsFromEnvironment();
    if (o.length) o.bounds.length = *o.length;
    if (o.index) o.bounds.index = *o.index;
    if (o.rank) o.bounds.rank = *o.rank;
    if (o.depth) o.bounds.depth = *o.depth;
    if (o.sample) o.bounds.sample = *o.sample;
    if (o.coefficients) o.bounds.coefficients = *o.coefficients;
}

ChaosBounds chaosBounds(const Bounds& b) {
    ChaosBounds c;
    c.lengthBound = b.length;
    c.indexBound = b.index;
    c.grading.coefficientBound = static_cast<std::int64_t>(b.coefficients);
    return c;
}

EmitterSearchOptions emitterOptions(const Bounds& b) {
    EmitterSearchOptions e;
    e.depthBound = b.depth;
    e.sampleBound = b.sample;
    return e;
}

EnumerationOptions enumerationOptions(const Options& o) {
    EnumerationOptions e;
    e.order = o.order == "reverse" ? EnumerationOrder::ReverseWithinLength : EnumerationOrder::Canonical;
    e.emitters = emitterOptions(o.bounds);
    return e;
}

Ultragraph load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{{{codes::kSyntax, "cannot read '" + path + "'", 0, 0}}};
    std::stringstream ss;
    ss << in.rdbuf();
    auto parsed = parseUltragraph(ss.str());
    if (!parsed.ok()) throw Failure{parsed.diagnostics};
    return std::move(*parsed.value);
}

ShiftPoint point(const Ultragraph& g, const std::string& spec, const Options& o) {
    auto p = parsePathSpec(spec, g, emitterOptions(o.bounds));
    if (!p.ok()) {
        for (auto& d : p.diagnostics) d.message = spec + ": " + d.message;
        throw Failure{p.diagnostics};
    }
    return *p;
}

VertexId vertexArg(const Ultragraph& g, const std::string& text) {
    auto s = parseVertexSet(text, g);
    if (!s.ok()) throw Failure{s.diagnostics};
    auto members = s->isFinite() ? s->members() : std::vector<VertexId>{};
    if (members.size() != 1) throw Failure{{{codes::kSyntax, "expected a single vertex such as u[0]", 1, 1}}};
    return members.front();
}

json boundsJson(const Bounds& b) {
    return json{{"length", b.length}, {"index", b.index},         {"rank", b.rank},
                {"depth", b.depth},   {"sample", b.sample},       {"coefficients", b.coefficients}};
}

json certificateJson(const PairCertificate& c) {
    return json{{"verdict", c.scrambled ? "scrambled" : "not-scrambled"},
                {"limsupPositive", c.limsupPositive},
                {"liminfZero", c.liminfZero},
                {"criteria", {{"limsup", c.limsupCriterion}, {"liminf", c.liminfCriterion}}},
                {"certificate", c.note}};
}

json verdictJson(const ChaosVerdict& v) {
    bool chaotic = v.kind == ChaosVerdict::Kind::Chaotic;
    json cert = {{"kind", v.certificateName()}};
    if (v.certificate == ChaosVerdict::Certificate::Grading) {
        json levels = json::object();
        for (const auto& [fam, lf] : v.levels) levels[fam] = {{"slope", lf.slope}, {"offset", lf.offset}};
        cert["levels"] = levels;
        cert["supplied"] = v.gradingSupplied;
    }
    return json{{"verdict", v.kindName()},
                {"vertex", chaotic ? json(v.vertex.str()) : json(nullptr)},
                {"c1", chaotic ? json(v.c1.str()) : json(nullptr)},
                {"c2", chaotic ? json(v.c2.str()) : json(nullptr)},
                {"certificate", cert},
                {"bounds", {{"length", v.bounds.lengthBound},
                            {"index", v.bounds.indexBound},
                            {"coefficients", v.bounds.grading.coefficientBound}}},
                {"criteria", chaotic ? "cp>=2" : v.kind == ChaosVerdict::Kind::NotChaotic ? "cp<=1 everywhere" : "-"}};
}

/// Exact decimal text, plus the double when it is representable.
json distanceValueJson(const DistanceValue& d) {
    return d.isRank() && d.rank > 1074 ? json(nullptr) : json(d.value());
}

json distanceJson(const DistanceValue& d) {
    const char* kind = d.isZero() ? "zero" : d.isRank() ? "rank" : "unknown-beyond";
    json j = {{"kind", kind}, {"rank", d.csvRank()}, {"value", distanceValueJson(d)}, {"valueText", d.valueString()}};
    if (d.kind == DistanceValue::Kind::UnknownBeyond) j["maxRank"] = d.maxRank;
    return j;
}

struct Output {
    int code = kExitOk;
    json result = json::object();
    std::string text;
};

Output runAnalyze(const Options& o) {
    Ultragraph g = load(o.input);
    auto v = decideChaos(g, chaosBounds(o.bounds));
    Output out;
    out.result = verdictJson(v);
    out.text = verdictRecord(v).str();
    if (v.kind == ChaosVerdict::Kind::Unknown) out.code = kExitUnknown;
    return out;
}

Output runCp(const Options& o, const std::string& vertexText, Index limit) {
    Ultragraph g = load(o.input);
    VertexId v = vertexArg(g, vertexText);
    ClosedPathBounds cb{o.bounds.length, o.bounds.index};
    auto search = closedPaths(g, v, cb, limit);
    auto decision = cpAtLeastTwo(g, v, cb);
    Output out;
    json ws = json::array();
    for (const auto& w : search.witnesses) ws.push_back(w.str());
    std::string answer = decision.answer == Tri::Yes ? "yes" : decision.answer == Tri::No ? "no" : "unknown";
    out.result = {{"vertex", v.str()},     {"witnesses", ws},    {"exhausted", search.exhausted},
                  {"cpAtLeastTwo", answer}, {"phase", decision.phase}, {"bounds", boundsJson(o.bounds)}};
    Record r;
    r.add("vertex", v.str());
    for (std::size_t i = 0; i < search.witnesses.size(); ++i)
        r.add("c" + std::to_string(i + 1), search.witnesses[i].str());
    r.add("exhausted", search.exhausted ? "true" : "false");
    r.add("verdict", "cp>=2 " + answer);
    r.add("criteria", decision.phase);
    r.add("bounds", "length=" + std::to_string(o.bounds.length) + " index=" + std::to_string(o.bounds.index));
    out.text = r.str();
    if (decision.answer == Tri::Unknown) out.code = kExitUnknown;
    return out;
}

Output runPairCheck(const Options& o, const std::string& xs, const std::string& ys) {
    Ultragraph g = load(o.input);
    ShiftPoint x = point(g, xs, o), y = point(g, ys, o);
    Output out;
    try {
        auto c = certifyPair(g, x, y);
        out.result = certificateJson(c);
        out.text = certificateRecord(c).str();
    } catch (const InsufficientMetadata& e) {
        out.result = {{"verdict", "Unknown"}, {"criteria", nullptr}, {"certificate", e.what()}};
        out.text = Record().add("verdict", "Unknown").add("criteria", "-").add("certificate", e.what()).str();
        out.code = kExitUnknown;
    }
    out.result["x"] = pathSpecStr(x);
    out.result["y"] = pathSpecStr(y);
    return out;
}

Output runScrambledSample(const Options& o, Index count, Index prefixLen, const std::string& familyName,
                          std::uint64_t seed) {
    Ultragraph g = load(o.input);
    auto v = decideChaos(g, chaosBounds(o.bounds));
    if (v.kind == ChaosVerdict::Kind::Unknown) {
        Output out;
        out.code = kExitUnknown;
        out.result = {{"chaos", verdictJson(v)}, {"points", json::array()}, {"pairs", json::array()}};
        out.text = verdictRecord(v).str();
        return out;
    }
    if (v.kind != ChaosVerdict::Kind::Chaotic)
        throw Failure{{{"E-PRECONDITION", "scrambled sets need a Chaotic verdict, got " + v.kindName(), 0, 0}}};
    SampleFamily family = familyName == "sprime" ? SampleFamily::SPrime : SampleFamily::SDoublePrime;
    auto s = scrambledSetSample(v, family, count, seed);
    Output out;
    json points = json::array();
    Record r;
    r.add("verdict", s.allScrambled() ? "scrambled" : "not-scrambled");
    r.add("vertex", v.vertex.str()).add("c1", v.c1.str()).add("c2", v.c2.str());
    r.add("family", sampleFamilyName(family));
    r.add("seed", std::to_string(seed));
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        std::string prefix = edgePathStr(realize(s.points[i], prefixLen));
        points.push_back({{"J", s.js[i].str()}, {"spec", pathSpecStr(s.points[i])}, {"prefix", prefix}});
        r.add("point[" + std::to_string(i) + "]", "J=" + s.js[i].str() + " " + prefix);
    }
    json pairs = json::array();
    for (const auto& p : s.pairs) {
        json pj = certificateJson(p.certificate);
        pj["i"] = p.i;
        pj["j"] = p.j;
        pairs.push_back(pj);
        r.add("pair[" + std::to_string(p.i) + "," + std::to_string(p.j) + "]",
              std::string(p.certificate.scrambled ? "scrambled " : "not-scrambled ") + criteriaStr(p.certificate));
    }
    r.add("certificate", "pairwise " + std::to_string(s.pairs.size()));
    r.add("bounds", boundsStr(v.bounds));
    out.result = {{"chaos", verdictJson(v)},  {"family", sampleFamilyName(family)}, {"seed", seed},
                  {"prefixLen", prefixLen},  {"allScrambled", s.allScrambled()},  {"points", points},
                  {"pairs", pairs}};
    out.text = r.str();
    return out;
}

Output runTrajectory(const Options& o, const std::string& xs, const std::string& ys, Index nMax) {
    Ultragraph g = load(o.input);
    ShiftPoint x = point(g, xs, o), y = point(g, ys, o);
    UltrapathEnumeration en(g, enumerationOptions(o));
    auto tr = trajectory(en, x, y, nMax, o.bounds.rank);
    Output out;
    json rows = json::array();
    std::string csv = "n,rank,value\n";
    for (std::size_t n = 0; n < tr.size(); ++n) {
        rows.push_back({{"n", n},
                        {"rank", tr[n].csvRank()},
                        {"value", distanceValueJson(tr[n])},
                        {"valueText", tr[n].valueString()}});
        csv += std::to_string(n) + "," + std::to_string(tr[n].csvRank()) + "," + tr[n].valueString() + "\n";
    }
    out.result = {{"x", pathSpecStr(x)}, {"y", pathSpecStr(y)}, {"nMax", nMax},
                  {"maxRank", o.bounds.rank}, {"order", o.order}, {"rows", rows}};
    out.text = csv;
    return out;
}

Output runMetric(const Options& o, const std::string& xs, const std::string& ys) {
    Ultragraph g = load(o.input);
    ShiftPoint x = point(g, xs, o), y = point(g, ys, o);
    UltrapathEnumeration en(g, enumerationOptions(o));
    auto d = distance(en, x, y, o.bounds.rank);
    Output out;
    out.result = distanceJson(d);
    out.result["x"] = pathSpecStr(x);
    out.result["y"] = pathSpecStr(y);
    out.result["order"] = o.order;
    Record r;
    r.add("distance", d.str()).add("rank", std::to_string(d.csvRank())).add("value", d.valueString());
    r.add("order", o.order);
    out.text = r.str();
    if (d.kind == DistanceValue::Kind::UnknownBeyond) out.code = kExitUnknown;
    return out;
}

Output runEnumP(const Options& o, Index count) {
    Ultragraph g = load(o.input);
    UltrapathEnumeration en(g, enumerationOptions(o));
    auto ps = en.enumerate(count);
    Output out;
    json entries = json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) {
        entries.push_back({{"rank", i + 1}, {"key", ps[i].serialize()}});
        out.text += std::to_string(i + 1) + " " + ps[i].serialize() + "\n";
    }
    out.result = {{"order", o.order}, {"count", count}, {"entries", entries}};
    return out;
}

Output runEmitters(const Options& o, const std::string& pathText) {
    Ultragraph g = load(o.input);
    EdgePath alpha;
    if (!pathText.empty()) {
        try {
            alpha = io::edgeList(g, pathText, "path");
        } catch (const io::ParseFailure& f) {
            throw Failure{{f.diag}};
        }
        if (auto bad = brokenLink(g, alpha))
            throw Failure{{{codes::kPath, "edge link broken at position " + std::to_string(*bad), 1, 1}}};
    }
    auto m = minimalEmittersForPath(g, alpha, emitterOptions(o.bounds));
    Output out;
    json list = json::array();
    Record r;
    r.add("path", alpha.empty() ? "-" : edgePathStr(alpha));
    for (std::size_t i = 0; i < m.emitters.size(); ++i) {
        const auto& e = m.emitters[i];
        json ranges = json::array();
        std::string trace;
        for (const auto& id : e.ranges) {
            ranges.push_back(id.str());
            trace += (trace.empty() ? "r(" : " & r(") + id.str() + ")";
        }
        std::string kind = e.singleton ? "singleton" : "intersection";
        list.push_back({{"set", vertexSetExpr(e.set)}, {"kind", kind}, {"ranges", ranges},
                        {"dichotomy", e.satisfiesDichotomy(g)}});
        r.add("emitter[" + std::to_string(i) + "]", vertexSetExpr(e.set) + " " + kind + (trace.empty() ? "" : " " + trace));
    }
    std::string notes;
    for (const auto& n : m.notes) notes += (notes.empty() ? "" : "; ") + n;
    r.add("verdict", m.complete ? "complete" : "Unknown");
    r.add("criteria", notes.empty() ? "-" : notes);
    r.add("bounds", "depth=" + std::to_string(o.bounds.depth) + " sample=" + std::to_string(o.bounds.sample));
    json notesJson = json::array();
    for (const auto& n : m.notes) notesJson.push_back(n);
    out.result = {{"path", edgePathStr(alpha)}, {"complete", m.complete}, {"notes", notesJson},
                  {"emitters", list}, {"bounds", boundsJson(o.bounds)}};
    out.text = r.str();
    if (!m.complete) out.code = kExitUnknown;
    return out;
}

void addCommon(CLI::App* sub, Options& o) {
    sub->add_option("file", o.input, "ultragraph presentation (.ug)")->required();
    sub->add_flag("--json", o.json, "emit the ultrashift/1 JSON document");
    sub->add_option("--output,-o", o.output, "write to this file instead of stdout");
    sub->add_option("--length-bound", o.length, "closed-path length bound");
    sub->add_option("--index-bound", o.index, "family index bound");
    sub->add_option("--max-rank", o.rank, "largest enumeration rank examined by the metric");
    sub->add_option("--depth-bound", o.depth, "range-intersection depth for minimal emitters");
    sub->add_option("--sample-bound", o.sample, "sampled indices for index-dependent ranges");
    sub->add_option("--coefficient-bound", o.coefficients, "grading coefficient bound");
    sub->add_option("--order", o.order, "enumeration order")->check(CLI::IsMember({"canonical", "reverse"}));
}

void emit(const Options& o, const std::string& command, const std::string& body) {
    if (o.output.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(o.output);
    if (!f) throw Failure{{{codes::kSyntax, command + ": cannot write '" + o.output + "'", 0, 0}}};
    f << body;
}

int reportFailure(const Options& o, const std::string& command, const Failure& f) {
    if (o.json) {
        json diags = json::array();
        for (const auto& d : f.diagnostics)
            diags.push_back({{"code", d.code}, {"message", d.message}, {"line", d.line}, {"column", d.column}});
        json doc = {{"schema", kSchema}, {"command", command}, {"input", o.input},
                    {"exit", kExitDiagnostics}, {"diagnostics", diags}};
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const auto& d : f.diagnostics) std::cerr << o.input << ":" << d.str() << "\n";
    }
    return kExitDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ultragraph shift spaces: chaos verdicts, scrambled pairs, distances"};
    app.require_subcommand(1);
    Options o;

    auto* analyze = app.add_subcommand("analyze", "decide Li-Yorke chaos");
    addCommon(analyze, o);

    std::string vertexText;
    Index limit = 2;
    auto* cp = app.add_subcommand("cp", "closed paths at a vertex");
    addCommon(cp, o);
    cp->add_option("--vertex", vertexText, "vertex such as u[0]")->required();
    cp->add_option("--limit", limit, "witnesses to list")->check(CLI::PositiveNumber);

    std::string xs, ys;
    auto* pair = app.add_subcommand("pair-check", "certify a pair as scrambled or not");
    addCommon(pair, o);
    pair->add_option("--x", xs, "path spec")->required();
    pair->add_option("--y", ys, "path spec")->required();

    Index count = 4, prefixLen = 16;
    std::string family = "sdoubleprime";
    std::uint64_t seed = 1;
    auto* sample = app.add_subcommand("scrambled-sample", "sample a scrambled set and certify every pair");
    addCommon(sample, o);
    sample->add_option("--count", count, "number of points")->check(CLI::Range(Index{2}, Index{64}));
    sample->add_option("--prefix-len", prefixLen, "edges shown per point");
    sample->add_option("--family", family, "sprime or sdoubleprime")
        ->check(CLI::IsMember({"sprime", "sdoubleprime"}));
    sample->add_option("--seed", seed, "sampling seed");

    Index nMax = 50;
    auto* traj = app.add_subcommand("trajectory", "d(sigma^n x, sigma^n y) as CSV");
    addCommon(traj, o);
    traj->add_option("--x", xs, "path spec")->required();
    traj->add_option("--y", ys, "path spec")->required();
    traj->add_option("--n-max", nMax, "last n");

    auto* metric = app.add_subcommand("metric", "distance between two points");
    addCommon(metric, o);
    metric->add_option("--x", xs, "path spec")->required();
    metric->add_option("--y", ys, "path spec")->required();

    Index enumCount = 20;
    auto* enumP = app.add_subcommand("enum-p", "first ultrapaths of the enumeration");
    addCommon(enumP, o);
    enumP->add_option("--count", enumCount, "entries");

    std::string pathText;
    auto* emitters = app.add_subcommand("emitters", "minimal infinite emitters M_alpha");
    addCommon(emitters, o);
    emitters->add_option("--path", pathText, "edges such as e[0].e[2]; empty for all of G^0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitDiagnostics;
    }

    CLI::App* used = app.get_subcommands().front();
    const std::string command = used->get_name();
    try {
        resolveBounds(o);
        Output out;
        if (used == analyze) out = runAnalyze(o);
        else if (used == cp) out = runCp(o, vertexText, limit);
        else if (used == pair) out = runPairCheck(o, xs, ys);
        else if (used == sample) out = runScrambledSample(o, count, prefixLen, family, seed);
        else if (used == traj) out = runTrajectory(o, xs, ys, nMax);
        else if (used == metric) out = runMetric(o, xs, ys);
        else if (used == enumP) out = runEnumP(o, enumCount);
        else out = runEmitters(o, pathText);

        if (o.json) {
            json doc = {{"schema", kSchema}, {"command", command}, {"input", o.input},
                        {"exit", out.code},  {"result", out.result}};
            emit(o, command, doc.dump(2) + "\n");
        } else {
            emit(o, command, out.text);
        }
        return out.code;
    } catch (const Failure& f) {
        return reportFailure(o, command, f);
    } catch (const std::exception& e) {
        return reportFailure(o, command, Failure{{{"E-INPUT", e.what(), 0, 0}}});
    }
}
