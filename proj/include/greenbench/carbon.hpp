#pragma once

/**
 * Carbon accounting: CF = E * alpha.
 *
 * Emission factors are stored in gCO2/kWh (the usual carbon-intensity unit)
 * and converted to kg exactly once, inside footprint().
 */

#include "greenbench/energy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace greenbench {

enum class EmissionScope { Scope1, Scope2, Scope3 };

std::string to_string(EmissionScope scope);
EmissionScope scope_from_string(const std::string &name);

struct EmissionFactor {
  std::string region;
  double gco2_per_kwh = 0.0; // > 0
  EmissionScope scope = EmissionScope::Scope2;
};

struct CarbonFootprint {
  double kg_co2e = 0.0;
  double energy_kwh = 0.0;
  EmissionFactor factor;
  std::optional<double> per_inference_kg;
};

// kg_co2e is the double rounding of the extended-precision product
// kwh * (gco2_per_kwh / 1000); the single rounding step keeps the result
// linear in energy to within 1 ulp.
CarbonFootprint footprint(const EnergyReading &energy, const EmissionFactor &factor);
double per_inference(const CarbonFootprint &cf, std::size_t n_inferences);

struct FactorTable {
  std::vector<EmissionFactor> rows;
  std::string source_path;

  // Case-insensitive on region; throws UnknownRegion listing available keys.
  const EmissionFactor &lookup(const std::string &region) const;
};

// CSV with header `region,gco2_per_kwh,scope`; `#` lines carry source notes.
FactorTable load_factor_table(const std::string &path);

} // namespace greenbench
