#include "pl/common/error.hpp"

namespace pl {

std::string_view code_name(Errc code) {
  switch (code) {
    case Errc::ValidationError: return "VALIDATION_ERROR";
    case Errc::NotFound: return "NOT_FOUND";
    case Errc::UnknownUid: return "UNKNOWN_UID";
    case Errc::DuplicatePassport: return "DUPLICATE_PASSPORT";
    case Errc::IllegalTransition: return "ILLEGAL_TRANSITION";
    case Errc::InvalidAirportCode: return "INVALID_AIRPORT_CODE";
    case Errc::FutureDate: return "FUTURE_DATE";
    case Errc::TooLong: return "TOO_LONG";
    case Errc::InvalidReport: return "INVALID_REPORT";
    case Errc::UnknownReason: return "UNKNOWN_REASON";
    case Errc::UnknownBenefit: return "UNKNOWN_BENEFIT";
    case Errc::BenefitDisabled: return "BENEFIT_DISABLED";
    case Errc::InsufficientBalance: return "INSUFFICIENT_BALANCE";
    case Errc::ParseError: return "PARSE_ERROR";
    case Errc::DuplicateBenefitId: return "DUPLICATE_BENEFIT_ID";
    case Errc::NonPositiveCost: return "NON_POSITIVE_COST";
    case Errc::NotAuthority: return "NOT_AUTHORITY";
    case Errc::EmptyBatch: return "EMPTY_BATCH";
    case Errc::InvalidEvent: return "INVALID_EVENT";
    case Errc::StorageFailure: return "STORAGE_FAILURE";
    case Errc::RangeOutOfBounds: return "RANGE_OUT_OF_BOUNDS";
    case Errc::ChainInvalid: return "CHAIN_INVALID";
    case Errc::ReplayConflict: return "REPLAY_CONFLICT";
    case Errc::ReadOnlyReplica: return "READ_ONLY_REPLICA";
    case Errc::Unauthorized: return "UNAUTHORIZED";
    case Errc::PeerUnreachable: return "PEER_UNREACHABLE";
    case Errc::InvalidBlock: return "INVALID_BLOCK";
    case Errc::CorruptStore: return "CORRUPT_STORE";
    case Errc::BindFailure: return "BIND_FAILURE";
    case Errc::ConfigError: return "CONFIG_ERROR";
    case Errc::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

}  // namespace pl
