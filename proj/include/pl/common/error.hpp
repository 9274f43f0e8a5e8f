#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace pl {

enum class Errc {
  ValidationError,
  NotFound,
  UnknownUid,
  DuplicatePassport,
  IllegalTransition,
  InvalidAirportCode,
  FutureDate,
  TooLong,
  InvalidReport,
  UnknownReason,
  UnknownBenefit,
  BenefitDisabled,
  InsufficientBalance,
  ParseError,
  DuplicateBenefitId,
  NonPositiveCost,
  NotAuthority,
  EmptyBatch,
  InvalidEvent,
  StorageFailure,
  RangeOutOfBounds,
  ChainInvalid,
  ReplayConflict,
  ReadOnlyReplica,
  Unauthorized,
  PeerUnreachable,
  InvalidBlock,
  CorruptStore,
  BindFailure,
  ConfigError,
  Internal,
};

/// Stable machine-readable name, e.g. "ILLEGAL_TRANSITION".
std::string_view code_name(Errc code);

using DetailValue = std::variant<std::string, std::int64_t>;
using Details = std::map<std::string, DetailValue>;

/// The single exception type thrown by domain operations. `details` carries
/// structured context (existing_uid, balance, ...) that the API surfaces.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, Details details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  Errc code() const noexcept { return code_; }
  const Details& details() const noexcept { return details_; }

 private:
  Errc code_;
  Details details_;
};

}  // namespace pl
