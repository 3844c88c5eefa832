#include "greenbench/carbon.hpp"

#include "greenbench/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace greenbench {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

} // namespace

std::string to_string(EmissionScope scope) {
  switch (scope) {
  case EmissionScope::Scope1:
    return "scope1";
  case EmissionScope::Scope2:
    return "scope2";
  case EmissionScope::Scope3:
    return "scope3";
  }
  return "scope2";
}

EmissionScope scope_from_string(const std::string &name) {
  const std::string s = lower(trim(name));
  if (s == "scope1") {
    return EmissionScope::Scope1;
  }
  if (s == "scope2") {
    return EmissionScope::Scope2;
  }
  if (s == "scope3") {
    return EmissionScope::Scope3;
  }
  throw MalformedFactorFile("unknown scope: " + name);
}

CarbonFootprint footprint(const EnergyReading &energy, const EmissionFactor &factor) {
  CarbonFootprint cf;
  cf.energy_kwh = energy.kwh;
  cf.factor = factor;
  // extended-precision product keeps CF linear in E to within 1 ulp
  cf.kg_co2e = static_cast<double>(static_cast<long double>(energy.kwh) *
                                   (static_cast<long double>(factor.gco2_per_kwh) / 1000.0L));
  return cf;
}

double per_inference(const CarbonFootprint &cf, std::size_t n_inferences) {
  if (n_inferences == 0) {
    throw ZeroInferences("n_inferences must be >= 1");
  }
  return cf.kg_co2e / static_cast<double>(n_inferences);
}

const EmissionFactor &FactorTable::lookup(const std::string &region) const {
  const std::string key = lower(region);
  for (const auto &row : rows) {
    if (lower(row.region) == key) {
      return row;
    }
  }
  std::string available;
  for (const auto &row : rows) {
    if (!available.empty()) {
      available += ", ";
    }
    available += row.region;
  }
  throw UnknownRegion("unknown region '" + region + "'; available: " + available);
}

FactorTable load_factor_table(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open factor file: " + path);
  }
  FactorTable table;
  table.source_path = path;

  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (!saw_header) {
      if (line != "region,gco2_per_kwh,scope") {
        throw MalformedFactorFile(path + ":" + std::to_string(line_no) +
                                  ": expected header `region,gco2_per_kwh,scope`");
      }
      saw_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string region, value, scope;
    if (!std::getline(row, region, ',') || !std::getline(row, value, ',') ||
        !std::getline(row, scope)) {
      throw MalformedFactorFile(path + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    EmissionFactor factor;
    factor.region = trim(region);
    if (factor.region.empty()) {
      throw MalformedFactorFile(path + ":" + std::to_string(line_no) + ": empty region");
    }
    try {
      factor.gco2_per_kwh = std::stod(trim(value));
    } catch (const std::exception &) {
      throw MalformedFactorFile(path + ":" + std::to_string(line_no) + ": bad gco2_per_kwh");
    }
    if (!(factor.gco2_per_kwh > 0.0)) {
      throw MalformedFactorFile(path + ":" + std::to_string(line_no) +
                                ": gco2_per_kwh must be > 0");
    }
    try {
      factor.scope = scope_from_string(scope);
    } catch (const MalformedFactorFile &) {
      throw MalformedFactorFile(path + ":" + std::to_string(line_no) + ": bad scope `" +
                                trim(scope) + "`");
    }
    table.rows.push_back(std::move(factor));
  }
  if (!saw_header) {
    throw MalformedFactorFile(path + ": missing header line");
  }
  return table;
}

} // namespace greenbench
