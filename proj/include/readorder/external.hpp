#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "readorder/comparator.hpp"
#include "readorder/document.hpp"

namespace readorder {

class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExternalConfig {
  std::vector<std::string> command;  // argv of the comparator process
  std::string regime = "image";     // advertised in the handshake
  double timeout_seconds = 10.0;    // per reply
};

// Wire protocol helpers (line-delimited JSON records).
std::string handshake_line(const std::string& regime);
std::string request_line(const BoundingBox& left, const BoundingBox& right,
                         double page_width, double page_height,
                         const std::optional<std::string>& left_image_ref,
                         const std::optional<std::string>& right_image_ref);
// Parses {"ok":true}; throws ProtocolError otherwise.
void check_handshake_reply(const std::string& line);
// Parses {"p": x} with x in [0,1]; throws ProtocolError otherwise.
double parse_score_reply(const std::string& line);

// Client for a comparator living in a child process, spoken to over its
// standard input/output, one reply per request, in order. The constructor
// spawns the process and performs the handshake. A failed spawn raises
// SpawnError, a late reply TimeoutError, and any off-protocol byte stream
// ProtocolError; no failure ever turns into a fabricated score.
class ExternalComparator : public PairwiseComparator {
 public:
  explicit ExternalComparator(ExternalConfig cfg);
  ~ExternalComparator() override;

  ExternalComparator(const ExternalComparator&) = delete;
  ExternalComparator& operator=(const ExternalComparator&) = delete;

  void bind_page(double page_width, double page_height);
  // Opaque per-box refs forwarded verbatim (e.g. image patch paths).
  using ImageRefProvider = std::function<std::optional<std::string>(const BoundingBox&)>;
  void set_image_ref_provider(ImageRefProvider provider);

  PairScore score(const BoundingBox& left, const BoundingBox& right) override;
  PairScore score(const BoundingBox& left, const BoundingBox& right,
                  double page_width, double page_height,
                  const std::optional<std::string>& left_image_ref,
                  const std::optional<std::string>& right_image_ref);

 private:
  struct Process;
  std::string exchange(const std::string& request);

  ExternalConfig cfg_;
  std::unique_ptr<Process> proc_;
  double page_width_ = 1.0;
  double page_height_ = 1.0;
  ImageRefProvider image_ref_provider_;
};

}  // namespace readorder
