#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pl/registry/engine.hpp"
#include "pl/registry/user_record.hpp"

namespace pl {

/// Citizen identification and status operations. All writes go through the
/// engine and are recorded on chain before returning.
class Registry {
 public:
  explicit Registry(Engine& engine) : engine_(engine) {}

  /// Errors: DuplicatePassport (details.existing_uid), TooLong, ValidationError.
  Recorded<UserRecord> register_user(std::optional<std::string> passport_number,
                                     std::string initial_location = {},
                                     std::string additional_info = {});

  /// Errors: UnknownUid, IllegalTransition.
  Recorded<UserRecord> update_band(const std::string& uid, ColourBand new_band,
                                   std::string reason, bool confirmed_positive = false);

  /// Errors: UnknownUid, InvalidAirportCode, FutureDate.
  Recorded<UserRecord> log_travel(const std::string& uid, TravelVisit visit);

  Recorded<UserRecord> update_location(const std::string& uid, std::string location);

  /// Replaces additional_info. Errors: UnknownUid, TooLong.
  Recorded<UserRecord> update_info(const std::string& uid, std::string text);

  /// Looks the query up as a uid first, then as a passport number.
  /// Throws NotFound.
  UserRecord find_user(std::string_view query) const;
  std::optional<UserRecord> find_by_uid(std::string_view uid) const;
  std::optional<UserRecord> find_by_passport(std::string_view passport) const;

 private:
  Engine& engine_;
};

namespace registry {

/// Trimmed passport, or nullopt when blank.
std::optional<std::string> normalize_passport(const std::optional<std::string>& passport);

const UserRecord& require_user(const State& state, const std::string& uid);

/// Validates and emits a Register event; returns the new uid.
std::string emit_register(Tx& tx, const std::optional<std::string>& passport,
                          const std::string& location, const std::string& info);

/// Validates and emits a BandUpdate event.
void emit_band_update(Tx& tx, const UserRecord& user, ColourBand to, const std::string& reason,
                      bool confirmed_positive, std::vector<std::string> findings = {});

void check_text_field(std::string_view value, std::size_t cap, std::string_view field);

}  // namespace registry

}  // namespace pl
