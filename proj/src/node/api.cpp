#include "pl/node/api.hpp"

#include <httplib.h>
#include <sodium.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>

#include "pl/exposure/hotspot_file.hpp"
#include "pl/node/node.hpp"

namespace pl::node {

namespace {

using httplib::Request;
using httplib::Response;
using Handler = std::function<void(const Request&, Response&)>;

constexpr std::uint64_t kMaxPageSize = 500;

void send(Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

[[noreturn]] void invalid(const std::string& field, const std::string& reason) {
  throw Error(Errc::ValidationError, field + ": " + reason, {{"field", field}, {"reason", reason}});
}

json parse_body(const Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) invalid("body", "expected a JSON object");
  return body;
}

std::string need_string(const json& body, const std::string& key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) invalid(key, "required");
  if (!it->is_string()) invalid(key, "must be a string");
  return it->get<std::string>();
}

std::optional<std::string> opt_string(const json& body, const std::string& key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) invalid(key, "must be a string");
  return it->get<std::string>();
}

bool opt_bool(const json& body, const std::string& key, bool fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) invalid(key, "must be a boolean");
  return it->get<bool>();
}

std::uint64_t opt_uint(const json& body, const std::string& key, std::uint64_t fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_unsigned()) invalid(key, "must be a non-negative integer");
  return it->get<std::uint64_t>();
}

CalendarDate need_date(const json& body, const std::string& key) {
  const auto text = need_string(body, key);
  if (auto d = CalendarDate::parse(text)) return *d;
  invalid(key, "expected YYYY-MM-DD");
}

std::uint64_t query_uint(const Request& req, const std::string& key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    invalid(key, "must be a non-negative integer");
  return v;
}

json user_write(const Recorded<UserRecord>& r) {
  return {{"user", to_json(r.value)}, {"block_height", r.block_height}};
}

json head_json(const ledger::Ledger& ledger) {
  const auto head = ledger.head();
  if (!head) return nullptr;
  return {{"height", head->height}, {"block_hash", crypto::to_hex(head->block_hash)}};
}

class Api {
 public:
  Api(httplib::Server& server, Node& node) : server_(server), node_(node) {}

  void install() {
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                 {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server_.Options(R"(.*)", [](const Request&, Response& res) { res.status = 204; });

    read("/healthz", [&n = node_](const Request&, Response& res) {
      send(res, 200, {{"status", "ok"},
                      {"role", to_string(n.config().role)},
                      {"head", head_json(n.ledger())}});
    });

    write_route("/users", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      auto r = n.registry().register_user(opt_string(body, "passport_number"),
                                              opt_string(body, "current_location").value_or(""),
                                              opt_string(body, "additional_info").value_or(""));
      send(res, 201, user_write(r));
    });
    read("/users", [&n = node_](const Request& req, Response& res) {
      if (!req.has_param("passport")) invalid("passport", "required");
      auto user = n.registry().find_by_passport(req.get_param_value("passport"));
      if (!user) throw Error(Errc::NotFound, "no user with that passport number");
      send(res, 200, to_json(*user));
    });
    read(R"(/users/([^/]+))", [&n = node_](const Request& req, Response& res) {
      auto user = n.registry().find_by_uid(req.matches[1].str());
      if (!user)
        throw Error(Errc::NotFound, "no user " + req.matches[1].str(),
                    {{"uid", req.matches[1].str()}});
      send(res, 200, to_json(*user));
    });
    read(R"(/users/([^/]+)/exposure)", [&n = node_](const Request& req, Response& res) {
      json findings = json::array();
      for (const auto& f : n.exposure().evaluate_user(req.matches[1].str()))
        findings.push_back(to_json(f));
      send(res, 200, {{"uid", req.matches[1].str()}, {"findings", std::move(findings)}});
    });

    write_route(R"(/users/([^/]+)/band)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      const auto band = parse_band(need_string(body, "band"));
      if (!band) invalid("band", "expected Green, Amber or Red");
      send(res, 200,
           user_write(n.registry().update_band(req.matches[1].str(), *band,
                                                   opt_string(body, "reason").value_or(""),
                                                   opt_bool(body, "confirmed_positive", false))));
    });
    write_route(R"(/users/([^/]+)/location)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      send(res, 200,
           user_write(n.registry().update_location(req.matches[1].str(),
                                                       need_string(body, "location"))));
    });
    write_route(R"(/users/([^/]+)/info)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      send(res, 200,
           user_write(n.registry().update_info(req.matches[1].str(),
                                                   need_string(body, "additional_info"))));
    });
    write_route(R"(/users/([^/]+)/travel)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      TravelVisit visit;
      visit.airport_code = need_string(body, "airport_code");
      visit.visit_date = need_date(body, "visit_date");
      visit.note = opt_string(body, "note");
      send(res, 200, user_write(n.registry().log_travel(req.matches[1].str(), visit)));
    });

    write_route(R"(/users/([^/]+)/tokens/issue)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      auto r = n.incentives().issue_token(req.matches[1].str(), need_string(body, "reason"),
                                              opt_uint(body, "amount", 1));
      send(res, 200, {{"account", to_json(r.value)}, {"block_height", r.block_height}});
    });
    write_route(R"(/users/([^/]+)/tokens/redeem)", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      auto receipt =
          n.incentives().redeem_tokens(req.matches[1].str(), need_string(body, "benefit_id"));
      send(res, 200, to_json(receipt));
    });
    read(R"(/users/([^/]+)/tokens)", [&n = node_](const Request& req, Response& res) {
      send(res, 200, to_json(n.incentives().account(req.matches[1].str())));
    });
    write_route("/volunteer", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      VolunteerRef who;
      who.uid = opt_string(body, "uid");
      who.passport = opt_string(body, "passport_number");
      who.location = opt_string(body, "current_location").value_or("");
      who.info = opt_string(body, "additional_info").value_or("");
      auto out = n.incentives().run_volunteer_flow(
          who, opt_string(body, "reason").value_or("VoluntaryTest"));
      send(res, out.created ? 201 : 200,
           {{"user", to_json(out.user)},
            {"account", to_json(out.account)},
            {"created", out.created},
            {"block_height", out.block_height}});
    });
    read("/policy", [&n = node_](const Request&, Response& res) {
      send(res, 200, to_json(n.incentives().policy()));
    });

    read("/verify", [&n = node_](const Request& req, Response& res) {
      std::string query;
      if (req.has_param("uid"))
        query = req.get_param_value("uid");
      else if (req.has_param("passport"))
        query = req.get_param_value("passport");
      else
        invalid("uid", "uid or passport required");
      send(res, 200, to_json(n.verify_user(query)));
    });

    write_route("/hotspots", [&n = node_](const Request& req, Response& res) {
      const auto body = parse_body(req);
      HotspotReport report;
      report.airport_code = need_string(body, "airport_code");
      report.case_date = need_date(body, "case_date");
      const auto count = opt_uint(body, "case_count", 1);
      if (count == 0 || count > std::numeric_limits<std::uint32_t>::max())
        invalid("case_count", "must be between 1 and 4294967295");
      report.case_count = static_cast<std::uint32_t>(count);
      report.source = opt_string(body, "source").value_or("");
      auto ack = n.exposure().ingest_hotspot(report);
      send(res, 201, {{"event_id", ack.event_id}, {"block_height", ack.block_height}});
    });
    write_route("/hotspots/import", [&n = node_](const Request& req, Response& res) {
      auto file = parse_hotspot_file(req.body);
      // Structurally valid lines can still fail domain validation; those are
      // reported like parse errors and skipped.
      std::vector<HotspotReport> good;
      json rejected = json::array();
      for (const auto& e : file.errors) rejected.push_back({{"line", e.line}, {"message", e.message}});
      for (std::size_t i = 0; i < file.reports.size(); ++i) {
        try {
          validate_report(file.reports[i]);
          good.push_back(file.reports[i]);
        } catch (const Error& e) {
          rejected.push_back({{"line", file.lines[i]}, {"message", e.what()}});
        }
      }
      std::sort(rejected.begin(), rejected.end(),
                [](const json& a, const json& b) { return a["line"] < b["line"]; });
      auto result = n.exposure().ingest_batch(good);
      send(res, 200,
           {{"accepted", result.accepted},
            {"rejected", std::move(rejected)},
            {"block_height", result.last_block_height ? json(*result.last_block_height)
                                                      : json(nullptr)},
            {"hotspot_reports", n.exposure().hotspot_count()}});
    });
    write_route("/exposure/sweep", [&n = node_](const Request&, Response& res) {
      auto s = n.exposure().sweep_and_flag();
      send(res, 200,
           {{"evaluated", s.evaluated},
            {"newly_flagged", s.newly_flagged},
            {"hotspot_reports", s.hotspot_reports},
            {"block_height", s.block_height ? json(*s.block_height) : json(nullptr)}});
    });

    read("/chain/head", [&n = node_](const Request&, Response& res) {
      send(res, 200, head_json(n.ledger()));
    });
    read(R"(/chain/blocks/(\d+))", [&n = node_](const Request& req, Response& res) {
      ledger::Height h = 0;
      const auto text = req.matches[1].str();
      if (std::from_chars(text.data(), text.data() + text.size(), h).ec != std::errc{})
        invalid("height", "out of range");
      auto& ledger = n.ledger();
      const auto block = ledger.get_block(h);
      send(res, 200,
           {{"height", h},
            {"frame", crypto::base64_encode(ledger.get_frame(h))},
            {"block", to_json(block, ledger.authority_key())}});
    });
    read("/chain/blocks", [&n = node_](const Request& req, Response& res) {
      auto& ledger = n.ledger();
      const auto from = query_uint(req, "from", 0);
      const auto limit = std::min(query_uint(req, "limit", 100), kMaxPageSize);
      const auto head = ledger.head();
      json blocks = json::array();
      if (head) {
        for (auto h = from; h <= head->height && h - from < limit; ++h)
          blocks.push_back({{"height", h}, {"frame", crypto::base64_encode(ledger.get_frame(h))}});
      }
      send(res, 200, {{"head", head ? json(head->height) : json(nullptr)},
                      {"blocks", std::move(blocks)}});
    });
    read("/chain/verify", [&n = node_](const Request& req, Response& res) {
      auto& ledger = n.ledger();
      const auto head = ledger.head();
      if (!head) {
        send(res, 200, {{"ok", true}, {"from", 0}, {"to", 0}, {"checked", 0}, {"failure", nullptr}});
        return;
      }
      const auto from = query_uint(req, "from", 0);
      const auto to = query_uint(req, "to", head->height);
      send(res, 200, to_json(ledger.verify_chain(from, to)));
    });
  }

 private:
  static Handler guard(Handler inner) {
    return [inner = std::move(inner)](const Request& req, Response& res) {
      try {
        inner(req, res);
      } catch (const Error& e) {
        send(res, http_status(e.code()), error_envelope(e));
      } catch (const json::exception& e) {
        send(res, 400, error_envelope(Error(Errc::ValidationError, e.what())));
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send(res, 500, error_envelope(Error(Errc::Internal, e.what())));
      }
    };
  }

  void read(const std::string& pattern, Handler h) { server_.Get(pattern, guard(std::move(h))); }

  void write_route(const std::string& pattern, Handler h) {
    server_.Post(pattern, guard([&n = node_, h = std::move(h)](const Request& req, Response& res) {
      if (!n.is_authority())
        throw Error(Errc::ReadOnlyReplica, "this node is a read-only replica");
      authorize(n, req);
      h(req, res);
    }));
  }

  // Handlers capture the node, not the Api, which only lives during install().
  static void authorize(const Node& n, const Request& req) {
    const auto& expected = n.config().auth_token;
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    bool ok = header.size() == prefix.size() + expected.size() &&
              header.compare(0, prefix.size(), prefix) == 0;
    if (ok)
      ok = sodium_memcmp(header.data() + prefix.size(), expected.data(), expected.size()) == 0;
    if (!ok) throw Error(Errc::Unauthorized, "missing or wrong bearer token");
  }

  httplib::Server& server_;
  Node& node_;
};

}  // namespace

void install_api(httplib::Server& server, Node& node) { Api(server, node).install(); }

}  // namespace pl::node
