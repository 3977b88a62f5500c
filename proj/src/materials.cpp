#include "rhps/materials.hpp"

#include <cmath>

#include "rhps/errors.hpp"

namespace rhps {

double units::in_plane_wavenumber(double omega_T, double theta_rad) {
    return vacuum_wavenumber(omega_T) * std::sin(theta_rad);
}

void ExcitonParams::validate() const {
    if (!(omega_T > 0)) throw ConfigurationError("exciton: omega_T must be positive");
    if (!(delta_LT > 0)) throw ConfigurationError("exciton: delta_LT must be positive");
    if (!(eps_bg >= 1)) throw ConfigurationError("exciton: eps_bg must be >= 1");
    if (!(mass > 0)) throw ConfigurationError("exciton: mass must be positive");
    if (!(gamma >= 0)) throw ConfigurationError("exciton: gamma must be >= 0");
}

void BiexcitonParams::validate(const ExcitonParams& ex) const {
    if (!(binding > 0)) throw ConfigurationError("biexciton: binding energy must be positive");
    if (!(mass > ex.mass)) throw ConfigurationError("biexciton: mass must exceed the exciton mass");
    if (!(gamma > 0)) throw ConfigurationError("biexciton: gamma must be positive");
    if (!(volume > 0)) throw ConfigurationError("biexciton: effective volume must be positive");
}

void MaterialParams::validate() const {
    exciton.validate();
    biexciton.validate(exciton);
}

MaterialParams cucl_defaults() {
    MaterialParams p;
    p.exciton = ExcitonParams{3202.2, 5.7, 5.59, 2.3, 0.5};
    p.biexciton = BiexcitonParams{32.2, 2.3 * 2.3, 0.0132, 80.0};
    return p;
}

PassiveMaterial vacuum() { return {"vacuum", 1.0}; }
PassiveMaterial pbf2() { return {"PbF2", 1.86}; }
PassiveMaterial pbbr2() { return {"PbBr2", 2.95}; }

PassiveMaterial passive_material(const std::string& name) {
    if (name == "vacuum") return vacuum();
    if (name == "PbF2") return pbf2();
    if (name == "PbBr2") return pbbr2();
    throw ConfigurationError("unknown passive material: " + name);
}

}  // namespace rhps
