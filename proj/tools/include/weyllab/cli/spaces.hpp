#pragma once

#include "weyllab/catalog.hpp"
#include "weyllab/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <random>

namespace weyllab::cli {

/// A catalog space ready for the tasks: its Weyl structure on one chart plus
/// whatever extra structure the space carries.
struct Space {
    std::string name;
    WeylStructure weyl;
    Vector default_point;
    /// Admissible points of a compact piece of the chart.
    std::function<Vector(std::mt19937_64&)> sample;

    /// Homothety group acting on `to_group(x)` coordinates, when the space has one.
    std::optional<HomothetyGroup> group;
    std::function<Vector(const Vector&)> to_group;
    /// One contracting step x ↦ η(x) in chart coordinates (towards ω), for level sets.
    std::function<Vector(const Vector&)> contract;
    /// Distance to the singular point in chart coordinates, when known in closed form.
    std::function<double(const Vector&)> delta;
    /// Deck transformation closing a loop of the quotient, in chart coordinates.
    std::optional<DeckTransformation> deck;

    std::optional<catalog::Genus2Surface> surface;
    nlohmann::ordered_json parameters;  // effective parameters, defaults filled in
};

/// The catalog names accepted by build_space.
const std::vector<std::string>& catalog_names();

/// ConfigError (field space.<key>) for unknown names, unknown or ill-typed
/// parameters and parameters the constructor rejects.
Space build_space(const SpaceSpec& spec);

}  // namespace weyllab::cli
