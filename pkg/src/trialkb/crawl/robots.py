"""robots.txt parsing and matching (User-agent, Disallow, Allow subset).

Rule precedence follows the longest-match convention; Allow wins ties.
Patterns support the '*' wildcard and the '$' end anchor.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class RobotsRule:
    allow: bool
    pattern: str

    def matches(self, path: str) -> bool:
        if not self.pattern:
            return False
        regex = "".join(
            ".*" if ch == "*" else re.escape(ch) for ch in self.pattern.rstrip("$")
        )
        if self.pattern.endswith("$"):
            regex += "$"
        return re.match(regex, path) is not None

    @property
    def specificity(self) -> int:
        return len(self.pattern)


@dataclass(frozen=True)
class RobotsRules:
    rules: tuple[RobotsRule, ...] = ()

    def is_allowed(self, path: str) -> bool:
        if not path.startswith("/"):
            path = "/" + path
        best: RobotsRule | None = None
        for rule in self.rules:
            if not rule.matches(path):
                continue
            if (
                best is None
                or rule.specificity > best.specificity
                or (rule.specificity == best.specificity and rule.allow and not best.allow)
            ):
                best = rule
        return best.allow if best is not None else True


ALLOW_ALL = RobotsRules(())
DISALLOW_ALL = RobotsRules((RobotsRule(allow=False, pattern="/"),))


def parse_robots(text: str, user_agent: str = "trialkb") -> RobotsRules:
    """Rules of the most specific matching User-agent group ('*' as fallback)."""
    agent_lower = user_agent.lower()
    groups: list[tuple[list[str], list[RobotsRule]]] = []
    current_agents: list[str] = []
    current_rules: list[RobotsRule] = []
    expecting_agents = True

    def close_group():
        nonlocal current_agents, current_rules
        if current_agents:
            groups.append((current_agents, current_rules))
        current_agents, current_rules = [], []

    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line or ":" not in line:
            continue
        field, _, value = line.partition(":")
        field = field.strip().lower()
        value = value.strip()
        if field == "user-agent":
            if not expecting_agents:
                close_group()
                expecting_agents = True
            current_agents.append(value.lower())
        elif field in ("disallow", "allow"):
            expecting_agents = False
            if value:
                current_rules.append(RobotsRule(allow=(field == "allow"), pattern=value))
        # other fields (crawl-delay, sitemap) are outside the honored subset
    close_group()

    best_rules: list[RobotsRule] | None = None
    best_len = -1
    for agents, rules in groups:
        for agent in agents:
            if agent == "*":
                match_len = 0
            elif agent in agent_lower:
                match_len = len(agent)
            else:
                continue
            if match_len > best_len:
                best_len = match_len
                best_rules = rules
    if best_rules is None:
        return ALLOW_ALL
    return RobotsRules(tuple(best_rules))


def rules_for_response(status: int, body: str, user_agent: str = "trialkb") -> RobotsRules:
    """Map a robots.txt fetch outcome to effective rules: 2xx parse,
    4xx allow all, anything else (5xx, unreachable) disallow all."""
    if 200 <= status < 300:
        return parse_robots(body, user_agent)
    if 400 <= status < 500:
        return ALLOW_ALL
    return DISALLOW_ALL
