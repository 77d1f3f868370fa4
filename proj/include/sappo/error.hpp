#pragma once

#include <stdexcept>
#include <string>

namespace sappo {

enum class ErrorCode {
  domain,                   // argument outside the mathematical domain
  degenerate_wall,          // zero-length wall segment
  invalid_room,             // fewer than 3 vertices, self-intersecting, zero area
  temperature_out_of_range, // sound-speed model only covers -40..60 C
  no_visible_pair,          // no transducer pair inside each other's cone
  inconsistent_measurement, // slant range shorter than the height offset
  degenerate_geometry,      // concentric / collinear beacons
  schema,                   // scenario file failed validation
  simulation,               // simulation could not run
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::degenerate_wall: return "degenerate_wall";
    case ErrorCode::invalid_room: return "invalid_room";
    case ErrorCode::temperature_out_of_range: return "temperature_out_of_range";
    case ErrorCode::no_visible_pair: return "no_visible_pair";
    case ErrorCode::inconsistent_measurement: return "inconsistent_measurement";
    case ErrorCode::degenerate_geometry: return "degenerate_geometry";
    case ErrorCode::schema: return "schema";
    case ErrorCode::simulation: return "simulation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sappo
