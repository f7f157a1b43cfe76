// Reference external comparator speaking the line-delimited JSON protocol on
// stdin/stdout. Modes exercise both the happy path and protocol violations:
//
//   stub_comparator constant <p>   always reply p
//   stub_comparator left-of        p = 1 when the left box starts further left
//   stub_comparator reading        p from (y, x) lexicographic box order
//   stub_comparator bad-range      reply p = 1.3
//   stub_comparator garbage        reply a non-JSON line
//   stub_comparator silent         never reply to requests
//   stub_comparator no-handshake   reply garbage to the handshake

#include <cstdio>
#include <iostream>
#include <string>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Box {
  double x_up, y_up, x_down, y_down;
};

Box parse_box(const json& j) {
  const auto& b = j.at("bbox");
  return Box{b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
             b.at(3).get<double>()};
}

}  // namespace

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "constant";
  double constant = argc > 2 ? std::atof(argv[2]) : 0.5;

  std::string line;
  if (!std::getline(std::cin, line)) return 1;
  if (mode == "no-handshake") {
    std::cout << "hello there\n" << std::flush;
    return 0;
  }
  std::cout << json{{"ok", true}}.dump() << "\n" << std::flush;

  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (mode == "silent") continue;
    if (mode == "garbage") {
      std::cout << "not a json reply\n" << std::flush;
      continue;
    }
    if (mode == "bad-range") {
      std::cout << json{{"p", 1.3}}.dump() << "\n" << std::flush;
      continue;
    }

    double p = constant;
    if (mode == "left-of" || mode == "reading") {
      json req = json::parse(line, nullptr, false);
      if (req.is_discarded()) {
        std::cout << "unparseable request\n" << std::flush;
        continue;
      }
      Box left = parse_box(req.at("left"));
      Box right = parse_box(req.at("right"));
      if (mode == "left-of") {
        p = left.x_up < right.x_up ? 1.0 : (left.x_up > right.x_up ? 0.0 : 0.5);
      } else {
        if (left.y_up != right.y_up) {
          p = left.y_up < right.y_up ? 1.0 : 0.0;
        } else if (left.x_up != right.x_up) {
          p = left.x_up < right.x_up ? 1.0 : 0.0;
        } else {
          p = 0.5;
        }
      }
    }
    std::cout << json{{"p", p}}.dump() << "\n" << std::flush;
  }
  return 0;
}
