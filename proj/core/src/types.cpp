#include "radioclass/types.hpp"

namespace radioclass {

std::string to_string(Label label) {
  return label == Label::Landing ? "landing" : "takeoff";
}

std::optional<Label> parse_label(const std::string& text) {
  if (text == "landing" || text == "Landing") return Label::Landing;
  if (text == "takeoff" || text == "Takeoff") return Label::Takeoff;
  return std::nullopt;
}

}  // namespace radioclass
