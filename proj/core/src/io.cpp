#include "diracspec/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "diracspec/errors.hpp"
#include "json.hpp"

namespace dirac {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema(const std::string& msg) { throw Error("io", "SchemaViolation", msg); }

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset to line number
    const std::size_t pos = std::min(e.byte, text.size());
    long line = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw Error("io", "SchemaViolation", "malformed JSON at line " + std::to_string(line) + ": " + e.what(),
                line);
  }
}

std::vector<double> numbers(const json& j, const char* field) {
  if (!j.contains(field)) schema(std::string("missing field \"") + field + "\"");
  const json& a = j.at(field);
  if (!a.is_array()) schema(std::string("field \"") + field + "\" must be an array");
  std::vector<double> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number())
      schema(std::string("field \"") + field + "\"[" + std::to_string(i) + "] is not a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

double number_or(const json& j, const char* field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number()) schema(std::string("field \"") + field + "\" must be a number");
  return j.at(field).get<double>();
}

int integer(const json& j, const char* field) {
  if (!j.contains(field)) schema(std::string("missing field \"") + field + "\"");
  if (!j.at(field).is_number_integer()) schema(std::string("field \"") + field + "\" must be an integer");
  return j.at(field).get<int>();
}

}  // namespace

Potential parse_potential_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) schema("potential file must hold a JSON object");
  if (!j.contains("type") || !j.at("type").is_string()) schema("missing string field \"type\"");
  const std::string type = j.at("type").get<std::string>();
  PotentialKind kind;
  const char* points_field;
  if (type == "piecewise") {
    kind = PotentialKind::piecewise;
    points_field = "breakpoints";
  } else if (type == "sampled") {
    kind = PotentialKind::sampled;
    points_field = "nodes";
  } else {
    schema("field \"type\" must be \"piecewise\" or \"sampled\", got \"" + type + "\"");
  }
  std::vector<double> pts = numbers(j, points_field);
  const double p = number_or(j, "p", 2.0);
  if (j.contains("Q")) {
    const json& a = j.at("Q");
    if (!a.is_array()) schema("field \"Q\" must be an array of 2x2 matrices");
    std::vector<Mat2> m;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const json& e = a[i];
      const auto bad = [&] { schema("field \"Q\"[" + std::to_string(i) + "] must be [[a,b],[c,d]]"); };
      if (!e.is_array() || e.size() != 2) bad();
      for (const json& row : e)
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) bad();
      m.push_back({e[0][0].get<double>(), e[0][1].get<double>(), e[1][0].get<double>(), e[1][1].get<double>()});
    }
    return Potential::from_matrices(kind, std::move(pts), m, p);
  }
  std::vector<double> q1 = numbers(j, "q1");
  std::vector<double> q2 = numbers(j, "q2");
  if (kind == PotentialKind::piecewise)
    return Potential::piecewise(std::move(pts), std::move(q1), std::move(q2), p);
  return Potential::sampled(std::move(pts), std::move(q1), std::move(q2), p);
}

Potential parse_potential_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> x, q1, q2;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    bool numeric = true;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric && x.empty() && lineno == 1) continue;  // header
    if (!numeric || vals.size() != 3)
      throw Error("io", "SchemaViolation",
                  "potential CSV line " + std::to_string(lineno) + ": expected x,q1,q2", lineno);
    x.push_back(vals[0]);
    q1.push_back(vals[1]);
    q2.push_back(vals[2]);
  }
  return Potential::sampled(std::move(x), std::move(q1), std::move(q2));
}

Potential load_potential(const std::string& path) {
  const std::string text = read_text_file(path);
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? parse_potential_csv(text) : parse_potential_json(text);
}

std::string potential_to_json(const Potential& q) {
  json j;
  const bool pw = q.kind() == PotentialKind::piecewise;
  j["type"] = pw ? "piecewise" : "sampled";
  j[pw ? "breakpoints" : "nodes"] = q.points();
  j["q1"] = q.q1();
  j["q2"] = q.q2();
  j["p"] = q.p();
  return j.dump(1) + "\n";
}

SpectrumPair SpectraFile::pair() const {
  if (!mu) schema("spectra file has no \"mu\" array");
  return {lambda, *mu, p};
}

NormingData SpectraFile::norming() const {
  if (!alpha) schema("norming file has no \"alpha\" array");
  return {lambda, *alpha, p};
}

SpectraFile parse_spectra_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) schema("spectra file must hold a JSON object");
  SpectraFile f;
  f.p = number_or(j, "p", 2.0);
  if (!(f.p >= 1.0)) schema("field \"p\" must be >= 1");
  const int lo = integer(j, "n_min");
  const int hi = integer(j, "n_max");
  if (hi < lo) schema("n_max must be >= n_min");
  const auto count = static_cast<std::size_t>(hi - lo + 1);
  auto seq = [&](const char* field) {
    std::vector<double> v = numbers(j, field);
    if (v.size() != count)
      schema(std::string("field \"") + field + "\" has " + std::to_string(v.size()) + " entries, expected " +
             std::to_string(count));
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!std::isfinite(v[i])) schema(std::string("field \"") + field + "\"[" + std::to_string(i) + "] is not finite");
    return IndexedSeq(lo, std::move(v));
  };
  f.lambda = seq("lambda");
  if (j.contains("mu")) f.mu = seq("mu");
  if (j.contains("alpha")) f.alpha = seq("alpha");
  return f;
}

SpectraFile load_spectra(const std::string& path) { return parse_spectra_json(read_text_file(path)); }

std::string spectra_to_json(const SpectraFile& f) {
  json j;
  j["p"] = f.p;
  j["n_min"] = f.lambda.n_min;
  j["n_max"] = f.lambda.n_max;
  j["lambda"] = f.lambda.v;
  if (f.mu) j["mu"] = f.mu->v;
  if (f.alpha) j["alpha"] = f.alpha->v;
  return j.dump(1) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "FileNotFound", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "WriteFailed", "cannot write " + path);
  out << text;
  if (!out) throw Error("io", "WriteFailed", "cannot write " + path);
}

}  // namespace dirac
