#include "rlp/runio.hpp"

#include <cstdio>
#include <stdexcept>

namespace rlp {

using nlohmann::json;

json spec_to_json(const ProblemSpec& spec) {
    json m;
    if (const auto* bm = std::get_if<BrownianModel>(&spec.model)) {
        m = {{"type", "brownian"}, {"mu", bm->mu}, {"sigma", bm->sigma}};
    } else {
        const auto& cl = std::get<CramerLundbergModel>(spec.model);
        m = {{"type", "cramer_lundberg"}, {"mu", cl.mu}, {"eta", cl.eta}, {"alpha", cl.alpha}};
    }
    return json{{"model", m},
                {"refraction", {{"delta", spec.refraction.delta}, {"b", spec.refraction.b}}},
                {"econ",
                 {{"q", spec.econ.q},
                  {"m", spec.econ.m},
                  {"l", spec.econ.l},
                  {"beta", spec.econ.beta}}}};
}

ProblemSpec spec_from_json(const json& j) {
    ProblemSpec spec;
    const auto& m = j.at("model");
    std::string type = m.at("type").get<std::string>();
    if (type == "brownian") {
        spec.model = BrownianModel{m.at("mu").get<double>(), m.at("sigma").get<double>()};
    } else if (type == "cramer_lundberg") {
        spec.model = CramerLundbergModel{m.at("mu").get<double>(), m.at("eta").get<double>(),
                                         m.at("alpha").get<double>()};
    } else {
        throw std::invalid_argument("unknown model type: " + type);
    }
    const auto& r = j.at("refraction");
    spec.refraction = {r.at("delta").get<double>(), r.at("b").get<double>()};
    const auto& e = j.at("econ");
    spec.econ = {e.at("q").get<double>(), e.at("m").get<double>(), e.at("l").get<double>(),
                 e.at("beta").get<double>()};
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
    return spec_from_json(j);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string RunManifest::to_line() const {
    json j{{"command", command}, {"version", kToolVersion}, {"spec", spec}, {"args", args},
           {"outputs", outputs}};
    return "# " + j.dump();
}

RunManifest RunManifest::parse_line(const std::string& line) {
    if (line.rfind("# ", 0) != 0)
        throw std::invalid_argument("manifest line must start with '# '");
    json j = json::parse(line.substr(2));
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.spec = j.at("spec");
    m.args = j.at("args");
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
}

CsvWriter::CsvWriter(const std::string& path, const RunManifest& manifest,
                     const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
    if (!out_) throw std::invalid_argument("cannot open output file: " + path);
    out_ << manifest.to_line() << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw std::logic_error("CSV row arity mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(fmt17(v));
    row(s);
}

}  // namespace rlp
