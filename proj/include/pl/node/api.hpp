#pragma once

namespace httplib {
class Server;
}

namespace pl::node {

class Node;

/// Registers every HTTP route of `node` on `server`.
void install_api(httplib::Server& server, Node& node);

}  // namespace pl::node
