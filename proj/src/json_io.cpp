#include "dflow/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dflow::io {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex value must be [re, im], got " + j.dump());
  }
  const cplx z{j[0].get<double>(), j[1].get<double>()};
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParseError("non-finite complex value " + j.dump());
  return z;
}

json series_to_json(const Series& f) {
  json coeffs = json::array();
  for (cplx a : f.coeffs()) coeffs.push_back(complex_to_json(a));
  return {{"truncation", f.truncation()}, {"coeffs", std::move(coeffs)}};
}

Series series_from_json(const json& j) {
  if (!j.is_object() || !j.contains("truncation") || !j.contains("coeffs")) {
    throw ParseError("series must be an object with \"truncation\" and \"coeffs\"");
  }
  const json& n = j["truncation"];
  if (!n.is_number_integer() || n.get<long long>() < 1) throw ParseError("\"truncation\" must be a positive integer");
  const auto truncation = n.get<std::size_t>();
  const json& c = j["coeffs"];
  if (!c.is_array()) throw ParseError("\"coeffs\" must be an array");
  if (c.size() != truncation) {
    throw ParseError("\"coeffs\" has " + std::to_string(c.size()) + " entries, expected truncation " +
                     std::to_string(truncation));
  }
  std::vector<cplx> coeffs;
  coeffs.reserve(truncation);
  for (std::size_t i = 0; i < c.size(); ++i) {
    try {
      coeffs.push_back(complex_from_json(c[i]));
    } catch (const ParseError& e) {
      throw ParseError("coeffs[" + std::to_string(i) + "]: " + e.what());
    }
  }
  return Series(std::move(coeffs));
}

json symbol_to_json(const Symbol& sym) { return {{"characteristic", sym.characteristic}, {"phi", series_to_json(sym.phi)}}; }

Symbol symbol_from_json(const json& j) {
  if (!j.is_object() || !j.contains("characteristic") || !j.contains("phi")) {
    throw ParseError("symbol must be an object with \"characteristic\" and \"phi\"");
  }
  const json& c = j["characteristic"];
  if (!c.is_number_integer() || c.get<long long>() < 0) throw ParseError("\"characteristic\" must be a non-negative integer");
  return {c.get<unsigned>(), series_from_json(j["phi"])};
}

json koenigs_to_json(const KoenigsFunction& h) {
  json tail = json::array();
  for (cplx d : h.tail) tail.push_back(complex_to_json(d));
  return {{"d1", complex_to_json(h.d1)}, {"tail", std::move(tail)}};
}

KoenigsFunction koenigs_from_json(const json& j) {
  if (!j.is_object() || !j.contains("d1") || !j.contains("tail") || !j["tail"].is_array()) {
    throw ParseError("koenigs function must be an object with \"d1\" and a \"tail\" array");
  }
  KoenigsFunction h;
  h.d1 = complex_from_json(j["d1"]);
  for (const auto& d : j["tail"]) h.tail.push_back(complex_from_json(d));
  return h;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
    throw ParseError(e.what(), line);
  } catch (const json::exception& e) {
    throw ParseError(e.what());  // e.g. number overflow, no position available
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dflow::io
