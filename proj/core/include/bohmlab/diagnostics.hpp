#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bohmlab {

enum class Severity { info, warning, error };

struct Diagnostic {
  Severity severity = Severity::info;
  std::string code;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "info";
}

inline void to_json(nlohmann::json& j, const Diagnostic& d) {
  j = nlohmann::json{{"severity", to_string(d.severity)}, {"code", d.code}, {"message", d.message}};
}

}  // namespace bohmlab
