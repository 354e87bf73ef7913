#ifndef ULTRASHIFT_REPORT_HPP
#define ULTRASHIFT_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include "ultrashift/certify.hpp"
#include "ultrashift/chaos.hpp"
#include "ultrashift/io.hpp"

namespace ultrashift {

/// Ordered `key: value` lines.
struct Record {
    std::vector<std::pair<std::string, std::string>> fields;

    Record& add(std::string key, std::string value) {
        fields.emplace_back(std::move(key), std::move(value));
        return *this;
    }

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : fields)
            if (k == key) return &v;
        return nullptr;
    }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : fields) out += k + ": " + v + "\n";
        return out;
    }
};

inline std::string gradingStr(const Grading& levels) {
    std::string out;
    for (const auto& [fam, lf] : levels) {
        if (!out.empty()) out += ", ";
        out += fam + "[n] -> " + linearExpr(lf.slope, lf.offset, "n");
    }
    return out;
}

inline std::string boundsStr(const ChaosBounds& b) {
    return "length=" + std::to_string(b.lengthBound) + " index=" + std::to_string(b.indexBound) +
           " coefficients=" + std::to_string(b.grading.coefficientBound);
}

inline std::string criteriaStr(const PairCertificate& c) {
    return std::string("limsup=") + c.limsupCriterion + " liminf=" + c.liminfCriterion;
}

inline Record verdictRecord(const ChaosVerdict& v) {
    Record r;
    r.add("verdict", v.kindName());
    bool chaotic = v.kind == ChaosVerdict::Kind::Chaotic;
    r.add("vertex", chaotic ? v.vertex.str() : "-");
    r.add("c1", chaotic ? v.c1.str() : "-");
    r.add("c2", chaotic ? v.c2.str() : "-");
    std::string cert = v.certificateName();
    if (v.certificate == ChaosVerdict::Certificate::Grading)
        cert += " {" + gradingStr(v.levels) + (v.gradingSupplied ? "} supplied" : "} searched");
    r.add("certificate", cert);
    r.add("bounds", boundsStr(v.bounds));
    r.add("criteria", chaotic ? "cp>=2" : v.kind == ChaosVerdict::Kind::NotChaotic ? "cp<=1 everywhere" : "-");
    return r;
}

inline Record certificateRecord(const PairCertificate& c) {
    Record r;
    r.add("verdict", c.scrambled ? "scrambled" : "not-scrambled");
    r.add("limsupPositive", c.limsupPositive ? "true" : "false");
    r.add("liminfZero", c.liminfZero ? "true" : "false");
    r.add("criteria", criteriaStr(c));
    r.add("certificate", c.note.empty() ? "-" : c.note);
    return r;
}

}  // namespace ultrashift

#endif  // ULTRASHIFT_REPORT_HPP
