#include "pl/cli/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pl/common/calendar.hpp"
#include "pl/common/text.hpp"
#include "pl/registry/band.hpp"

namespace pl::cli {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Request {
  std::string method;  // GET or POST
  std::string path;
  std::string body;
  std::string content_type = "application/json";
};

struct Context {
  std::string node_url = "http://127.0.0.1:8080";
  std::string token;
  bool json_output = false;
};

void require_airport(const std::string& code) {
  if (!is_airport_code(code)) throw UsageError("airport code must be three uppercase letters: " + code);
}

void require_date(const std::string& text) {
  if (!CalendarDate::parse(text)) throw UsageError("date must be YYYY-MM-DD: " + text);
}

void require_nonempty(const std::string& value, const std::string& what) {
  if (trim(value).empty()) throw UsageError(what + " must not be empty");
}

std::string encode_query(const std::string& v) { return httplib::detail::encode_query_param(v); }

std::string encode_path(const std::string& v) { return httplib::detail::encode_url(v); }

void print_value(std::ostream& out, const std::string& indent, const std::string& key,
                 const json& v) {
  if (v.is_object()) {
    out << indent << key << ":\n";
    for (const auto& [k, x] : v.items()) print_value(out, indent + "  ", k, x);
  } else if (v.is_array()) {
    out << indent << key << ": " << (v.empty() ? "(none)" : "") << "\n";
    for (const auto& x : v) {
      if (x.is_object()) {
        out << indent << "  -\n";
        for (const auto& [k, y] : x.items()) print_value(out, indent + "    ", k, y);
      } else {
        out << indent << "  - " << (x.is_string() ? x.get<std::string>() : x.dump()) << "\n";
      }
    }
  } else {
    out << indent << key << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

void print_human(std::ostream& out, const json& body) {
  if (body.is_object()) {
    for (const auto& [k, v] : body.items()) print_value(out, "", k, v);
  } else {
    out << body.dump(2) << "\n";
  }
}

int execute(const Context& ctx, const Request& req, std::ostream& out, std::ostream& err) {
  httplib::Client client(ctx.node_url);
  if (!client.is_valid()) {
    err << "error: invalid node URL " << ctx.node_url << "\n";
    return kExitUsage;
  }
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (!ctx.token.empty()) headers.emplace("Authorization", "Bearer " + ctx.token);

  auto res = req.method == "GET" ? client.Get(req.path, headers)
                                 : client.Post(req.path, headers, req.body, req.content_type);
  if (!res) {
    err << "error: cannot reach " << ctx.node_url << ": " << httplib::to_string(res.error())
        << "\n";
    return kExitNetwork;
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) {
    err << "error: node returned HTTP " << res->status << " with a non-JSON body\n";
    return kExitNetwork;
  }
  const bool ok = res->status >= 200 && res->status < 300;
  if (ctx.json_output) {
    out << body.dump() << "\n";
  } else if (ok) {
    print_human(out, body);
  }
  if (ok) return kExitOk;
  const auto code = body.value("code", std::string("HTTP_") + std::to_string(res->status));
  err << "error: " << code << ": " << body.value("message", std::string()) << "\n";
  return kExitApi;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env) {
  Context ctx;
  if (auto v = env("PL_NODE_URL")) ctx.node_url = *v;
  if (auto v = env("PL_AUTH_TOKEN")) ctx.token = *v;

  CLI::App app{"Operator tool for a passport ledger node", "pl"};
  app.require_subcommand(1);
  app.add_option("--node", ctx.node_url, "Node base URL (PL_NODE_URL)");
  app.add_option("--token", ctx.token, "Bearer token for writes (PL_AUTH_TOKEN)");
  app.add_flag("--json", ctx.json_output, "Print the raw JSON response");

  // Each subcommand callback fills `req`; the request runs after parsing so
  // that every argument is validated before the network is touched.
  std::optional<Request> req;
  auto get = [&](std::string path) { req = Request{"GET", std::move(path), {}}; };
  auto post = [&](std::string path, const json& body) {
    req = Request{"POST", std::move(path), body.dump()};
  };

  // user
  auto* user = app.add_subcommand("user", "Register, update and search citizens");
  user->require_subcommand(1);

  std::optional<std::string> reg_passport;
  std::string reg_location, reg_info;
  auto* reg = user->add_subcommand("register", "Register a citizen");
  reg->add_option("--passport", reg_passport, "Passport number");
  reg->add_option("--location", reg_location, "Current location");
  reg->add_option("--info", reg_info, "Additional information");
  reg->callback([&] {
    if (reg_info.size() > limits::kInfoBytes) throw UsageError("--info exceeds 4096 bytes");
    json body{{"current_location", reg_location}, {"additional_info", reg_info}};
    body["passport_number"] = reg_passport ? json(*reg_passport) : json(nullptr);
    post("/users", body);
  });

  std::string band_uid, band_value, band_reason;
  bool band_confirmed = false;
  auto* band = user->add_subcommand("band", "Change a citizen's colour band");
  band->add_option("uid", band_uid, "Unique ID")->required();
  band->add_option("band", band_value, "Green, Amber or Red")->required();
  band->add_option("--reason", band_reason, "Reason recorded with the change");
  band->add_flag("--confirmed-positive", band_confirmed, "Confirmed positive test (Green to Red)");
  band->callback([&] {
    const auto parsed = parse_band(band_value);
    if (!parsed) throw UsageError("band must be Green, Amber or Red: " + band_value);
    post("/users/" + encode_path(band_uid) + "/band",
         {{"band", std::string(to_string(*parsed))},
          {"reason", band_reason},
          {"confirmed_positive", band_confirmed}});
  });

  std::string travel_uid, travel_airport, travel_date;
  std::optional<std::string> travel_note;
  auto* travel = user->add_subcommand("travel", "Log an airport visit");
  travel->add_option("uid", travel_uid, "Unique ID")->required();
  travel->add_option("airport", travel_airport, "IATA airport code")->required();
  travel->add_option("date", travel_date, "Visit date YYYY-MM-DD")->required();
  travel->add_option("--note", travel_note, "Free-text note");
  travel->callback([&] {
    require_airport(travel_airport);
    require_date(travel_date);
    json body{{"airport_code", travel_airport}, {"visit_date", travel_date}};
    body["note"] = travel_note ? json(*travel_note) : json(nullptr);
    post("/users/" + encode_path(travel_uid) + "/travel", body);
  });

  std::string loc_uid, loc_value;
  auto* location = user->add_subcommand("location", "Update current location");
  location->add_option("uid", loc_uid, "Unique ID")->required();
  location->add_option("location", loc_value, "New location")->required();
  location->callback([&] {
    post("/users/" + encode_path(loc_uid) + "/location", {{"location", loc_value}});
  });

  std::string info_uid, info_value;
  auto* info = user->add_subcommand("info", "Replace additional information");
  info->add_option("uid", info_uid, "Unique ID")->required();
  info->add_option("text", info_value, "New text")->required();
  info->callback([&] {
    if (info_value.size() > limits::kInfoBytes) throw UsageError("text exceeds 4096 bytes");
    post("/users/" + encode_path(info_uid) + "/info", {{"additional_info", info_value}});
  });

  std::string search_uid, search_passport;
  auto* search = user->add_subcommand("search", "Find a citizen by uid or passport number");
  auto* s_uid = search->add_option("--uid", search_uid, "Unique ID");
  auto* s_pass = search->add_option("--passport", search_passport, "Passport number");
  s_uid->excludes(s_pass);
  search->callback([&] {
    if (!search_uid.empty())
      get("/users/" + encode_path(search_uid));
    else if (!search_passport.empty())
      get("/users?passport=" + encode_query(search_passport));
    else
      throw UsageError("one of --uid or --passport is required");
  });

  std::string exp_uid;
  auto* user_exp = user->add_subcommand("exposure", "List airport exposures for a citizen");
  user_exp->add_option("uid", exp_uid, "Unique ID")->required();
  user_exp->callback([&] { get("/users/" + encode_path(exp_uid) + "/exposure"); });

  // token
  auto* token = app.add_subcommand("token", "Incentive tokens");
  token->require_subcommand(1);

  std::string issue_uid, issue_reason = "VoluntaryTest";
  std::uint64_t issue_amount = 1;
  auto* issue = token->add_subcommand("issue", "Issue tokens to a citizen");
  issue->add_option("uid", issue_uid, "Unique ID")->required();
  issue->add_option("--reason", issue_reason, "Incentive reason code");
  issue->add_option("--amount", issue_amount, "Number of tokens")->check(CLI::Range(1ull, 1'000'000'000ull));
  issue->callback([&] {
    require_nonempty(issue_reason, "--reason");
    post("/users/" + encode_path(issue_uid) + "/tokens/issue",
         {{"reason", issue_reason}, {"amount", issue_amount}});
  });

  std::string redeem_uid, redeem_benefit;
  auto* redeem = token->add_subcommand("redeem", "Redeem tokens for a benefit");
  redeem->add_option("uid", redeem_uid, "Unique ID")->required();
  redeem->add_option("benefit", redeem_benefit, "Benefit id")->required();
  redeem->callback([&] {
    post("/users/" + encode_path(redeem_uid) + "/tokens/redeem", {{"benefit_id", redeem_benefit}});
  });

  std::string bal_uid;
  auto* balance = token->add_subcommand("balance", "Show a token account");
  balance->add_option("uid", bal_uid, "Unique ID")->required();
  balance->callback([&] { get("/users/" + encode_path(bal_uid) + "/tokens"); });

  std::optional<std::string> vol_uid, vol_passport;
  std::string vol_reason = "VoluntaryTest", vol_location, vol_info;
  auto* volunteer = token->add_subcommand("volunteer", "Reward a volunteer, registering if needed");
  auto* v_uid = volunteer->add_option("--uid", vol_uid, "Existing Unique ID");
  volunteer->add_option("--passport", vol_passport, "Passport number")->excludes(v_uid);
  volunteer->add_option("--reason", vol_reason, "Incentive reason code");
  volunteer->add_option("--location", vol_location, "Location for a new record");
  volunteer->add_option("--info", vol_info, "Information for a new record");
  volunteer->callback([&] {
    require_nonempty(vol_reason, "--reason");
    json body{{"reason", vol_reason}, {"current_location", vol_location}, {"additional_info", vol_info}};
    if (vol_uid) body["uid"] = *vol_uid;
    if (vol_passport) body["passport_number"] = *vol_passport;
    post("/volunteer", body);
  });

  auto* policy = token->add_subcommand("policy", "Show the active redemption policy");
  policy->callback([&] { get("/policy"); });

  // hotspot
  auto* hotspot = app.add_subcommand("hotspot", "Airport case reports");
  hotspot->require_subcommand(1);

  std::string import_path;
  auto* import = hotspot->add_subcommand("import", "Bulk import AIRPORT,DATE,COUNT,SOURCE lines");
  import->add_option("file", import_path, "Report file")->required();
  import->callback([&] {
    req = Request{"POST", "/hotspots/import", read_file(import_path), "text/plain"};
  });

  std::string add_airport, add_date, add_source;
  std::uint32_t add_count = 1;
  auto* add = hotspot->add_subcommand("add", "Add one case report");
  add->add_option("airport", add_airport, "IATA airport code")->required();
  add->add_option("date", add_date, "Case date YYYY-MM-DD")->required();
  add->add_option("--count", add_count, "Case count")->check(CLI::PositiveNumber);
  add->add_option("--source", add_source, "Reporting source");
  add->callback([&] {
    require_airport(add_airport);
    require_date(add_date);
    post("/hotspots", {{"airport_code", add_airport},
                       {"case_date", add_date},
                       {"case_count", add_count},
                       {"source", add_source}});
  });

  // exposure
  auto* exposure = app.add_subcommand("exposure", "Exposure evaluation");
  exposure->require_subcommand(1);
  auto* sweep = exposure->add_subcommand("sweep", "Flag Green citizens with airport exposure");
  sweep->callback([&] { post("/exposure/sweep", json::object()); });

  // chain
  auto* chain = app.add_subcommand("chain", "Inspect and audit the chain");
  chain->require_subcommand(1);

  std::optional<std::uint64_t> verify_from, verify_to;
  auto* cverify = chain->add_subcommand("verify", "Verify hashes, links and signatures");
  cverify->add_option("--from", verify_from, "First height");
  cverify->add_option("--to", verify_to, "Last height");
  cverify->callback([&] {
    if (verify_from && verify_to && *verify_from > *verify_to)
      throw UsageError("--from must not exceed --to");
    std::string path = "/chain/verify";
    std::string sep = "?";
    if (verify_from) path += sep + "from=" + std::to_string(*verify_from), sep = "&";
    if (verify_to) path += sep + "to=" + std::to_string(*verify_to);
    get(path);
  });

  std::string show_which;
  auto* show = chain->add_subcommand("show", "Show a block");
  show->add_option("height", show_which, "Block height or 'head'")->required();
  show->callback([&] {
    if (show_which == "head") {
      req = Request{"GET", "head", {}};  // resolved below
      return;
    }
    if (show_which.empty() ||
        show_which.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("height must be a non-negative integer or 'head'");
    get("/chain/blocks/" + show_which);
  });

  auto* head = chain->add_subcommand("head", "Show the chain head");
  head->callback([&] { get("/chain/head"); });

  // verify
  std::string ver_uid, ver_passport;
  auto* verify = app.add_subcommand("verify", "Gatekeeper band check");
  auto* vu = verify->add_option("--uid", ver_uid, "Unique ID");
  verify->add_option("--passport", ver_passport, "Passport number")->excludes(vu);
  verify->callback([&] {
    if (!ver_uid.empty())
      get("/verify?uid=" + encode_query(ver_uid));
    else if (!ver_passport.empty())
      get("/verify?passport=" + encode_query(ver_passport));
    else
      throw UsageError("one of --uid or --passport is required");
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!req) {
    err << app.help();
    return kExitUsage;
  }

  if (req->path == "head") {
    // `chain show head` needs the head height first.
    std::ostringstream head_out, head_err;
    Context quiet = ctx;
    quiet.json_output = true;
    const int rc = execute(quiet, Request{"GET", "/chain/head", {}}, head_out, head_err);
    if (rc != kExitOk) {
      err << head_err.str();
      return rc;
    }
    const auto h = json::parse(head_out.str());
    if (h.is_null()) {
      err << "error: chain is empty\n";
      return kExitApi;
    }
    req = Request{"GET", "/chain/blocks/" + std::to_string(h.at("height").get<std::uint64_t>()), {}};
  }
  return execute(ctx, *req, out, err);
}

}  // namespace pl::cli
