"""Deterministic fixture-data generator.

Builds the bundled test universe: a company/person KB seed, a clinical-trial
registry with known per-term counts, static company sites with robots rules,
a labeled entity-linking corpus and gold slot triples. Run as
`python -m trialkb.fixtures.generate` to regenerate `fixtures/data/`;
output is stable for a fixed seed.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..extract.folding import fold
from ..extract.variants import strip_legal_suffix

SEED = 20240817
PAGE_SIZE = 10

DATA_DIR = Path(__file__).parent / "data"

# (name, country, tags, aliases, trial_count_class)
# trial classes: "none", "page" (=10), "twopage" (=20), "big" (=25), "rand"
COMPANIES: list[tuple[str, str, tuple[str, ...], tuple[str, ...], str]] = [
    ("Novagenix AG", "CH", ("biotech",), (), "big"),
    ("Rhonix Therapeutics AG", "CH", ("biotech", "pharma"), (), "rand"),
    ("Bergheim Pharma GmbH", "DE", ("pharma",), (), "rand"),
    ("Cambridge Biologics Inc", "US", ("biotech",), (), "page"),
    ("Lakeside Medical Ltd", "GB", ("medtech",), (), "rand"),
    ("Fontaine Biosciences SA", "FR", ("biotech",), (), "rand"),
    ("Gotthard Diagnostics AG", "CH", ("diagnostics",), (), "rand"),
    ("Hanse Oncology GmbH", "DE", ("pharma", "biotech"), (), "rand"),
    ("Isarix Biotech GmbH", "DE", ("biotech",), (), "rand"),
    ("Jura Medtech SA", "FR", ("medtech",), (), "rand"),
    ("Kander Pharmaceuticals Ltd", "GB", ("pharma",), ("Kander Pharma",), "rand"),
    ("Limmat Genetics AG", "CH", ("biotech",), (), "rand"),
    ("Morava Biologics GmbH", "AT", ("biotech",), (), "rand"),
    ("Nordwind Pharma GmbH", "AT", ("pharma",), (), "rand"),
    ("Oberland Vaccines AG", "CH", ("biotech",), (), "page"),
    ("Pannonia Diagnostics GmbH", "AT", ("diagnostics",), (), "rand"),
    ("Quellwerk Bioscience GmbH", "DE", ("biotech",), (), "rand"),
    ("Riviera Oncology SA", "FR", ("pharma",), (), "rand"),
    ("Seeland Therapeutics AG", "CH", ("biotech",), (), "twopage"),
    ("Ticino Medical SA", "CH", ("medtech",), (), "rand"),
    ("Umbra Biologics Ltd", "GB", ("biotech",), (), "rand"),
    ("Vindonissa Pharma AG", "CH", ("pharma",), (), "rand"),
    ("Wessex Genomics PLC", "GB", ("biotech",), (), "rand"),
    ("Xellon Biotech Inc", "US", ("biotech",), (), "rand"),
    ("Yarrow Pharmaceuticals Inc", "US", ("pharma",), (), "rand"),
    ("Zugersee Diagnostics AG", "CH", ("diagnostics",), (), "rand"),
    ("Albis Medical AG", "CH", ("medtech",), (), "rand"),
    ("Breisgau Biotech GmbH", "DE", ("biotech",), (), "rand"),
    ("Corsica Pharma SA", "FR", ("pharma",), (), "rand"),
    ("Danube Medical GmbH", "AT", ("medtech",), (), "rand"),
    ("Ember Biosciences Inc", "US", ("biotech",), (), "rand"),
    ("Firth Pharmaceuticals Ltd", "GB", ("pharma",), (), "rand"),
    ("Glarus Biologics AG", "CH", ("biotech",), (), "rand"),
    ("Harlem Diagnostics Inc", "US", ("diagnostics",), (), "rand"),
    ("Swiss Biotech Partners GmbH", "CH", ("biotech",), ("SwissBio",), "rand"),
    # ambiguous pairs: shared alias, disjoint domain tags
    ("Apex Therapeutics AG", "CH", ("biotech",), ("Apex",), "rand"),
    ("Apex Logistics GmbH", "DE", ("logistics",), ("Apex",), "none"),
    ("Helix Pharma SA", "FR", ("pharma",), ("Helix",), "rand"),
    ("Helix Freight Ltd", "GB", ("logistics",), ("Helix",), "none"),
    ("Meridian Biosciences Inc", "US", ("biotech",), ("Meridian",), "rand"),
    ("Meridian Shipping NV", "NL", ("logistics",), ("Meridian",), "none"),
    ("Quantum Medical GmbH", "DE", ("medtech",), ("Quantum",), "rand"),
    ("Quantum Mining PLC", "GB", ("mining",), ("Quantum",), "none"),
    ("Stellar Genomics Ltd", "GB", ("biotech",), ("Stellar",), "rand"),
    ("Stellar Media SA", "FR", ("media",), ("Stellar",), "none"),
    ("Orion Diagnostics AG", "CH", ("diagnostics",), ("Orion",), "rand"),
    ("Orion Energy Corp", "US", ("energy",), ("Orion",), "none"),
    ("Atlas Biotech SA", "FR", ("biotech",), ("Atlas",), "rand"),
    ("Atlas Insurance PLC", "GB", ("finance",), ("Atlas",), "none"),
    ("Vega Oncology Inc", "US", ("biotech", "pharma"), ("Vega",), "rand"),
    ("Vega Consulting GmbH", "AT", ("consulting",), ("Vega",), "none"),
    ("Polaris Therapeutics Ltd", "GB", ("pharma",), ("Polaris",), "rand"),
    ("Polaris Foods NV", "NL", ("food",), ("Polaris",), "none"),
    ("Zenith Biologics AG", "CH", ("biotech",), ("Zenith",), "rand"),
    ("Zenith Airlines SA", "FR", ("aviation",), ("Zenith",), "none"),
]

PERSONS = [
    ("p-001", "Alice Keller"),
    ("p-002", "Marc Dupont"),
    ("p-003", "Thomas Berger"),
    ("p-004", "Laura Stein"),
    ("p-005", "James Wright"),
    ("p-006", "Nora Blanc"),
    ("p-007", "Petra Vogel"),
    ("p-008", "Omar Haddad"),
    ("p-009", "Ines Moser"),
]

# fixture registry phase vocabulary with the generator's intended mapping
PHASE_VOCAB: list[tuple[str, str]] = [
    ("Phase 1", "PHASE_1"),
    ("Phase I", "PHASE_1"),
    ("phase 1", "PHASE_1"),
    ("Phase1", "PHASE_1"),
    ("Phase 1a", "PHASE_1"),
    ("Early Phase 1", "EARLY_PHASE_1"),
    ("Early Phase I", "EARLY_PHASE_1"),
    ("Phase 1/Phase 2", "PHASE_1_2"),
    ("Phase I/II", "PHASE_1_2"),
    ("Phase 1/2", "PHASE_1_2"),
    ("Phase 1, Phase 2", "PHASE_1_2"),
    ("Phase 1 / Phase 2", "PHASE_1_2"),
    ("Phase 2", "PHASE_2"),
    ("Phase II", "PHASE_2"),
    ("Phase 2b", "PHASE_2"),
    ("PHASE II", "PHASE_2"),
    ("Phase 2/Phase 3", "PHASE_2_3"),
    ("Phase II/III", "PHASE_2_3"),
    ("Phase 2, Phase 3", "PHASE_2_3"),
    ("Phase 3", "PHASE_3"),
    ("Phase III", "PHASE_3"),
    ("Phase 3b", "PHASE_3"),
    ("Phase 4", "PHASE_4"),
    ("Phase IV", "PHASE_4"),
    ("N/A", "NOT_APPLICABLE"),
    ("Not Applicable", "NOT_APPLICABLE"),
    ("Human pharmacology (Phase I)", "PHASE_1"),
    ("Therapeutic exploratory (Phase II)", "PHASE_2"),
    ("Therapeutic confirmatory (Phase III)", "PHASE_3"),
    ("Therapeutic use (Phase IV)", "PHASE_4"),
    ("Phase II (Therapeutic exploratory)", "PHASE_2"),
    ("Phase I and Phase II", "PHASE_1_2"),
]

STATUS_VOCAB = [
    ("Completed", 30),
    ("Recruiting", 25),
    ("Active, not recruiting", 20),
    ("Terminated", 8),
    ("Withdrawn", 5),
    ("Unknown status", 5),
    ("Not yet recruiting", 4),
    ("Enrolling by invitation", 3),
]

CONDITIONS = [
    "Type 2 Diabetes", "Breast Cancer", "Melanoma", "Alzheimer Disease",
    "Rheumatoid Arthritis", "Asthma", "Hypertension", "Multiple Sclerosis",
    "Pancreatic Cancer", "Chronic Kidney Disease", "Migraine", "Obesity",
]
INTERVENTIONS = [
    "Drug: NVX-128", "Drug: Placebo", "Biological: mAb-77", "Device: Stent-X4",
    "Drug: Compound 9", "Procedure: Ablation", "Drug: TKI-55", "Biological: Vaccine V2",
]

SITES = {
    "c-001": "novagenix",
    "c-002": "rhonix",
    "c-003": "bergheim",
    "c-004": "cambridgebio",
    "c-005": "lakeside",
    "c-006": "fontaine",
}


def company_id(index: int) -> str:
    return f"c-{index + 1:03d}"


@dataclass
class Universe:
    companies: list[dict] = field(default_factory=list)
    persons: list[dict] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    term_counts: dict[str, int] = field(default_factory=dict)
    gold_slots: list[tuple[str, str, str]] = field(default_factory=list)
    gold_mentions: list[tuple[str, int, int, str]] = field(default_factory=list)
    docs: dict[str, str] = field(default_factory=dict)
    hard_docs: set[str] = field(default_factory=set)


def build_companies() -> list[dict]:
    companies = []
    for index, (name, country, tags, aliases, trial_class) in enumerate(COMPANIES):
        cid = company_id(index)
        row = {
            "id": cid,
            "canonical_name": name,
            "aliases": sorted(aliases),
            "country": country,
            "website": None,
            "website_path": f"/sites/{SITES[cid]}/index.html" if cid in SITES else None,
            "personnel": [],
            "phones": [],
            "last_harvested": None,
            "domain_tags": sorted(tags),
            "trial_class": trial_class,
        }
        companies.append(row)
    # personnel and phones for the site-owning companies
    by_id = {c["id"]: c for c in companies}
    by_id["c-001"]["personnel"] = [["p-007", "chief executive officer"], ["p-008", "chief scientific officer"]]
    by_id["c-002"]["personnel"] = [["p-001", "chief executive officer"], ["p-002", "chief financial officer"]]
    by_id["c-002"]["phones"] = ["+41442001100"]
    by_id["c-003"]["personnel"] = [["p-003", "chief executive officer"]]
    by_id["c-004"]["personnel"] = [["p-004", "chief executive officer"]]
    by_id["c-004"]["phones"] = ["+16175550142"]
    by_id["c-005"]["personnel"] = [["p-005", "chief executive officer"]]
    by_id["c-006"]["personnel"] = [["p-006", "chief executive officer"]]
    by_id["c-006"]["phones"] = ["+33142868300"]
    return companies


def build_persons() -> list[dict]:
    affiliations = {
        "p-001": [["c-002", "chief executive officer", "fixture-seed"]],
        "p-002": [["c-002", "chief financial officer", "fixture-seed"]],
        "p-003": [["c-003", "chief executive officer", "fixture-seed"]],
        "p-004": [["c-004", "chief executive officer", "fixture-seed"]],
        "p-005": [["c-005", "chief executive officer", "fixture-seed"]],
        "p-006": [["c-006", "chief executive officer", "fixture-seed"]],
        "p-007": [["c-001", "chief executive officer", "fixture-seed"]],
        "p-008": [["c-001", "chief scientific officer", "fixture-seed"]],
        "p-009": [["c-007", "scientific advisor", "fixture-seed"]],
    }
    return [
        {"id": pid, "full_name": name, "affiliations": affiliations.get(pid, [])}
        for pid, name in PERSONS
    ]


def trial_count(trial_class: str, rng: random.Random) -> int:
    if trial_class == "none":
        return 0
    if trial_class == "page":
        return PAGE_SIZE
    if trial_class == "twopage":
        return 2 * PAGE_SIZE
    if trial_class == "big":
        return 25
    return rng.randint(5, 18)


def weighted_status(rng: random.Random) -> str:
    total = sum(w for _, w in STATUS_VOCAB)
    roll = rng.randint(1, total)
    for status, weight in STATUS_VOCAB:
        roll -= weight
        if roll <= 0:
            return status
    return STATUS_VOCAB[0][0]


def build_registry(universe: Universe, rng: random.Random) -> None:
    nct = 0
    vocab_cycle = 0
    for company in universe.companies:
        count = trial_count(company["trial_class"], rng)
        universe.term_counts[company["canonical_name"]] = count
        for _ in range(count):
            nct += 1
            record: dict = {"nct_id": f"NCT{nct:08d}"}
            record["brief_title"] = (
                f"A Study of {rng.choice(INTERVENTIONS).split(': ')[1]} in "
                f"{rng.choice(CONDITIONS)}"
            )
            # cycle the vocabulary so every phase string is observed, then mix
            if vocab_cycle < len(PHASE_VOCAB):
                raw_phase, intended = PHASE_VOCAB[vocab_cycle]
                vocab_cycle += 1
                record["phase"] = raw_phase
            elif rng.random() < 0.08:
                intended = None  # optional field absent
            else:
                raw_phase, intended = rng.choice(PHASE_VOCAB)
                record["phase"] = raw_phase
            record["overall_status"] = weighted_status(rng)
            stripped = strip_legal_suffix(company["canonical_name"])
            use_stripped = stripped != company["canonical_name"] and rng.random() < 0.25
            record["lead_sponsor"] = stripped if use_stripped else company["canonical_name"]
            record["conditions"] = sorted(rng.sample(CONDITIONS, rng.randint(1, 2)))
            record["interventions"] = sorted(rng.sample(INTERVENTIONS, rng.randint(1, 2)))
            record["last_update"] = (
                f"{rng.randint(2023, 2025)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            )
            universe.records.append(record)

            trial_id = f"fixture-registry:{record['nct_id']}"
            universe.gold_slots.append((trial_id, "performedBy", company["id"]))
            if intended is not None:
                universe.gold_slots.append((trial_id, "clinicalPhaseOf", intended))


def check_cross_matching(universe: Universe) -> None:
    """Every record must be retrievable by exactly one company term."""
    terms = [c["canonical_name"] for c in universe.companies]
    for record in universe.records:
        sponsor = fold(record["lead_sponsor"])
        matches = [
            t for t in terms
            if sponsor in fold(t) or fold(t) in sponsor
        ]
        if len(matches) != 1:
            raise AssertionError(
                f"record {record['nct_id']} sponsor {record['lead_sponsor']!r} "
                f"matches terms {matches}"
            )


# -- fixture sites ------------------------------------------------------------


def _page(title: str, body_lines: list[str]) -> str:
    body = "\n".join(body_lines)
    return (
        "<!DOCTYPE html>\n<html>\n<head><title>" + title + "</title></head>\n"
        "<body>\n" + body + "\n</body>\n</html>\n"
    )


def build_big_site(slug: str) -> tuple[dict[str, str], list[dict]]:
    """30-page site: index links everything; private area is robots-disallowed."""
    pages: dict[str, str] = {}
    links: list[tuple[str, str]] = [
        ("team.html", "Our Team"),
        ("about/leadership.html", "Leadership"),
        ("contact.html", "Contact"),
        ("impressum.html", "Impressum"),
        ("board.html", "Board of Directors"),
        ("management.html", "Management"),
        ("about.html", "About Us"),
        ("people/scientific-team.html", "Scientific Team"),
        ("private/hr-board.html", "Internal"),
        ("people/advisors.html", "Advisors"),
        ("news.html", "Newsroom"),
        ("private/internal-1.html", "Intranet"),
    ]
    for i in range(1, 11):
        links.append((f"products/p{i}.html", f"Product P{i}"))
    for i in range(1, 8):
        links.append((f"blog/post-{i}.html", f"Notes {i}"))
    links.append(("http://offsite.example/partners", "Partner network"))

    index_lines = ["<h1>Novagenix AG</h1>", "<p>Developing therapies that matter.</p>", "<ul>"]
    for href, anchor in links:
        index_lines.append(f'<li><a href="{href}">{anchor}</a></li>')
    index_lines.append("</ul>")
    pages["index.html"] = _page("Novagenix AG", index_lines)

    pages["team.html"] = _page("Team", [
        "<h1>Team</h1>",
        "<ul>",
        "<li>Dr. Petra Vogel - Chief Executive Officer</li>",
        "<li>Omar Haddad - Chief Scientific Officer</li>",
        "</ul>",
    ])
    pages["about/leadership.html"] = _page("Leadership", [
        "<h1>Leadership principles</h1>",
        "<p>We believe in scientific rigor and long-term partnerships.</p>",
    ])
    pages["contact.html"] = _page("Contact", [
        "<h1>Contact</h1>",
        "<p>Reach our office at +41 58 100 20 30.</p>",
        "<p>Werkstrasse 12, 7000 Chur</p>",
    ])
    pages["impressum.html"] = _page("Impressum", [
        "<h1>Impressum</h1>",
        "<p>Novagenix AG, Werkstrasse 12, 7000 Chur</p>",
        "<p>Telefon: +41 58 100 20 30</p>",
    ])
    pages["board.html"] = _page("Board", [
        "<h1>Board</h1>",
        "<ul>",
        "<li>Hans Meier - Board Member</li>",
        "<li>Petra Vogel - Board Member</li>",
        "</ul>",
    ])
    pages["management.html"] = _page("Management", [
        "<h1>Management</h1>",
        "<p>Our management group coordinates research and operations.</p>",
    ])
    pages["about.html"] = _page("About", [
        "<h1>About us</h1>",
        "<p>Founded in Chur, focused on immunology.</p>",
    ])
    pages["people/scientific-team.html"] = _page("Scientific Team", [
        "<h1>Scientific Team</h1>",
        "<li>Greta Lindt - Head of Research</li>",
    ])
    pages["people/advisors.html"] = _page("Advisors", [
        "<h1>Advisors</h1>",
        "<li>Ines Moser - Scientific Advisor</li>",
    ])
    pages["news.html"] = _page("News", ["<h1>News</h1>", "<p>No announcements this week.</p>"])
    pages["private/hr-board.html"] = _page("HR board", ["<h1>Internal HR board</h1>"])
    pages["private/internal-1.html"] = _page("Intranet", ["<h1>Internal</h1>"])
    for i in range(1, 11):
        pages[f"products/p{i}.html"] = _page(f"Product P{i}", [
            f"<h1>Product P{i}</h1>", "<p>Preclinical asset.</p>",
        ])
    for i in range(1, 8):
        pages[f"blog/post-{i}.html"] = _page(f"Notes {i}", [
            f"<h1>Notes {i}</h1>", "<p>Lab notebook extract.</p>",
        ])

    graph = [{
        "page": f"/sites/{slug}/index.html",
        "links": [
            {
                "href": href if href.startswith("http") else f"/sites/{slug}/{href}",
                "anchor": anchor,
                "off_domain": href.startswith("http"),
            }
            for href, anchor in links
        ],
    }]
    return pages, graph


def build_small_sites() -> dict[str, dict[str, str]]:
    sites: dict[str, dict[str, str]] = {}

    def small(slug: str, heading: str, team_items: list[str], contact_lines: list[str]) -> None:
        pages: dict[str, str] = {}
        pages["index.html"] = _page(heading, [
            f"<h1>{heading}</h1>",
            '<ul>',
            '<li><a href="team.html">Team</a></li>',
            '<li><a href="contact.html">Contact</a></li>',
            '<li><a href="about.html">About</a></li>',
            '<li><a href="products.html">Pipeline</a></li>',
            "</ul>",
        ])
        pages["team.html"] = _page("Team", ["<h1>Team</h1>", "<ul>"] + team_items + ["</ul>"])
        pages["contact.html"] = _page("Contact", ["<h1>Contact</h1>"] + contact_lines)
        pages["about.html"] = _page("About", ["<h1>About</h1>", "<p>Company background.</p>"])
        pages["products.html"] = _page("Pipeline", ["<h1>Pipeline</h1>", "<p>Two clinical programs.</p>"])
        sites[slug] = pages

    small("rhonix", "Rhonix Therapeutics AG", [
        "<li>Dr. Jane Roe - Chief Executive Officer</li>",
        "<li>Marc Dupont - Chief Financial Officer</li>",
    ], [
        "<p>Phone: +41 81 286 24 24</p>",
        "<p>Bahnhofstrasse 5, 7000 Chur</p>",
    ])
    small("bergheim", "Bergheim Pharma GmbH", [
        "<li>Thomas Berger - Chief Executive Officer</li>",
        "<li>Elena Fischer - Chief Scientific Officer</li>",
    ], [
        "<p>Telefon: 089 1234 5678</p>",
        "<p>Lindwurmstr. 4, Muenchen</p>",
    ])
    small("cambridgebio", "Cambridge Biologics Inc", [
        "<li>Laura Stein - Chief Executive Officer</li>",
    ], [
        "<p>Call us: +1 (617) 555-0142</p>",
        "<p>12 Main Street, Cambridge MA</p>",
    ])
    small("lakeside", "Lakeside Medical Ltd", [
        "<li>James Wright - Chief Executive Officer</li>",
    ], [
        "<p>Phone: 020 7946 0958</p>",
        "<p>Enquiries: +44 123</p>",
    ])
    small("fontaine", "Fontaine Biosciences SA", [
        "<li>Nora Blanc - Chief Executive Officer</li>",
    ], [
        "<p>Tel: +33 1 42 86 83 00</p>",
    ])
    return sites


def page_gold_slots() -> list[tuple[str, str, str]]:
    return [
        ("p-007", "chiefExecutiveOfficerOf", "c-001"),
        ("p-007", "hasKeyPerson", "c-001"),  # board page lists the CEO as board member
        ("p-008", "hasKeyPerson", "c-001"),
        ("provisional:person:hans-meier", "hasKeyPerson", "c-001"),
        ("provisional:person:greta-lindt", "hasKeyPerson", "c-001"),
        ("c-001", "isPhoneNumberOf", "+41581002030"),
        ("provisional:person:jane-roe", "chiefExecutiveOfficerOf", "c-002"),
        ("p-002", "hasKeyPerson", "c-002"),
        ("c-002", "isPhoneNumberOf", "+41812862424"),
        ("p-003", "chiefExecutiveOfficerOf", "c-003"),
        ("provisional:person:elena-fischer", "hasKeyPerson", "c-003"),
        ("c-003", "isPhoneNumberOf", "+498912345678"),
        ("p-004", "chiefExecutiveOfficerOf", "c-004"),
        ("c-004", "isPhoneNumberOf", "+16175550142"),
        ("p-005", "chiefExecutiveOfficerOf", "c-005"),
        ("c-005", "isPhoneNumberOf", "+442079460958"),
        ("p-006", "chiefExecutiveOfficerOf", "c-006"),
        ("c-006", "isPhoneNumberOf", "+33142868300"),
    ]


# -- linking corpus -----------------------------------------------------------

SINGLE_TEMPLATES = [
    "{A} announced topline results from a late-stage study.",
    "Researchers at {A} reported progress in {cond} treatment.",
    "{A} raised additional funding to expand its pipeline.",
    "Regulators granted {A} a fast-track designation.",
    "{A} opened a new laboratory near {city}.",
]
PAIR_TEMPLATES = [
    "{A} and {B} entered a co-development agreement.",
    "{A} licensed a preclinical compound from {B}.",
    "A joint venture between {A} and {B} was announced today.",
]
AMBIG_TEMPLATE = "{CTX} said its partner {AMB} would co-sponsor the upcoming study."
NIL_TEMPLATE = "{AMB} posted quarterly results above expectations."
CITIES = ["Basel", "Geneva", "Vienna", "Lyon", "Manchester", "Denver"]


@dataclass
class DocBuilder:
    doc_id: str
    parts: list[str] = field(default_factory=list)
    length: int = 0
    mentions: list[tuple[int, int, str]] = field(default_factory=list)

    def add(self, text: str) -> None:
        self.parts.append(text)
        self.length += len(text)

    def add_mention(self, surface: str, entity_id: str) -> None:
        start = self.length
        self.add(surface)
        self.mentions.append((start, start + len(surface), entity_id))

    def text(self) -> str:
        return "".join(self.parts)


def _fill_template(builder: DocBuilder, template: str, slots: dict[str, tuple[str, str]],
                   fillers: dict[str, str]) -> None:
    pos = 0
    while pos < len(template):
        brace = template.find("{", pos)
        if brace == -1:
            builder.add(template[pos:])
            break
        builder.add(template[pos:brace])
        end = template.find("}", brace)
        key = template[brace + 1 : end]
        if key in slots:
            surface, entity_id = slots[key]
            builder.add_mention(surface, entity_id)
        else:
            builder.add(fillers[key])
        pos = end + 1


def surface_choices(company: dict) -> list[str]:
    """Unambiguous surfaces for one company (canonical, stripped, folded)."""
    name = company["canonical_name"]
    choices = [name, name]  # canonical twice: favored
    stripped = strip_legal_suffix(name)
    if stripped != name:
        choices.append(stripped)
    choices.append(fold(name))
    return choices


def build_corpus(universe: Universe, rng: random.Random) -> None:
    doc_index = 0
    companies = universe.companies
    by_alias: dict[str, list[dict]] = {}
    for company in companies:
        for alias in company["aliases"]:
            by_alias.setdefault(alias, []).append(company)
    ambiguous_aliases = sorted(a for a, cs in by_alias.items() if len(cs) > 1)

    def new_doc() -> DocBuilder:
        nonlocal doc_index
        doc_index += 1
        return DocBuilder(doc_id=f"doc-{doc_index:03d}")

    def finish(builder: DocBuilder) -> None:
        universe.docs[builder.doc_id] = builder.text()
        for start, end, entity_id in builder.mentions:
            universe.gold_mentions.append((builder.doc_id, start, end, entity_id))

    # plain docs: every company appears at least three times across the corpus
    roster = [c for c in companies for _ in range(3)]
    rng.shuffle(roster)
    while roster:
        builder = new_doc()
        sentences = rng.randint(2, 3)
        for _ in range(sentences):
            if len(roster) >= 2 and rng.random() < 0.4:
                a, b = roster.pop(), roster.pop()
                if a["id"] == b["id"]:
                    roster.append(b)
                    b = None
                template = rng.choice(PAIR_TEMPLATES) if b else rng.choice(SINGLE_TEMPLATES)
                slots = {"A": (rng.choice(surface_choices(a)), a["id"])}
                if b is not None:
                    slots["B"] = (rng.choice(surface_choices(b)), b["id"])
                _fill_template(builder, template, slots,
                               {"cond": rng.choice(CONDITIONS), "city": rng.choice(CITIES)})
            elif roster:
                a = roster.pop()
                _fill_template(builder, rng.choice(SINGLE_TEMPLATES),
                               {"A": (rng.choice(surface_choices(a)), a["id"])},
                               {"cond": rng.choice(CONDITIONS), "city": rng.choice(CITIES)})
            builder.add(" ")
        finish(builder)

    # ambiguous docs with disambiguating context: life-science member wins
    for alias in ambiguous_aliases:
        members = by_alias[alias]
        life = next(c for c in members if set(c["domain_tags"]) & {"biotech", "pharma", "medtech", "diagnostics"})
        context_pool = [
            c for c in companies
            if c["id"] != life["id"]
            and not c["aliases"]
            and set(c["domain_tags"]) & set(life["domain_tags"])
        ]
        for _ in range(2):
            ctx = rng.choice(context_pool)
            builder = new_doc()
            _fill_template(
                builder,
                AMBIG_TEMPLATE,
                {"CTX": (ctx["canonical_name"], ctx["id"]), "AMB": (alias, life["id"])},
                {},
            )
            finish(builder)

    # ambiguous without context: must stay NIL
    for alias in ambiguous_aliases[:4]:
        builder = new_doc()
        _fill_template(builder, NIL_TEMPLATE, {"AMB": (alias, "NIL")}, {})
        finish(builder)

    # hard cases: misspelled surfaces the linker cannot ground (recall headroom)
    hard_companies = [c for c in companies if not c["aliases"]][:8]
    for company in hard_companies:
        builder = new_doc()
        name = company["canonical_name"]
        misspelled = name.replace("a", "", 1) if "a" in name else name[:-1]
        builder.add("According to filings, ")
        builder.add_mention(misspelled, company["id"])
        builder.add(" plans a new facility.")
        universe.hard_docs.add(builder.doc_id)
        finish(builder)


def verify_corpus(universe: Universe) -> None:
    """Run the real linker over the corpus: gold must be achievable exactly
    (hard-case and NIL rows excepted by construction)."""
    from ..kb.store import KnowledgeBase
    from ..kb.models import CompanyEntity, PersonEntity
    from ..extract.gazetteer import build_gazetteer
    from ..extract.linking import coherence_rerank, link_mentions

    kb = KnowledgeBase()
    kb.bulk_load([_company_entity(c) for c in universe.companies])
    kb.bulk_load([
        PersonEntity(id=p["id"], full_name=p["full_name"],
                     affiliations=tuple(tuple(a) for a in p["affiliations"]))
        for p in universe.persons
    ])
    gazetteer = build_gazetteer(kb)

    gold_by_doc: dict[str, dict[tuple[int, int], str]] = {}
    for doc_id, start, end, entity_id in universe.gold_mentions:
        gold_by_doc.setdefault(doc_id, {})[(start, end)] = entity_id

    for doc_id, text in universe.docs.items():
        mentions = coherence_rerank(link_mentions(text, gazetteer), kb)
        gold = gold_by_doc.get(doc_id, {})
        resolved_by_span = {}
        for mention in mentions:
            if mention.resolved is None:
                continue
            resolved_by_span[mention.span] = mention.resolved
            expected = gold.get(mention.span)
            if expected is None:
                raise AssertionError(
                    f"{doc_id}: unintended mention {mention.surface!r} at {mention.span} "
                    f"resolved to {mention.resolved}"
                )
            if expected == "NIL":
                raise AssertionError(
                    f"{doc_id}: NIL-gold mention {mention.surface!r} got linked to {mention.resolved}"
                )
            if expected != mention.resolved:
                raise AssertionError(
                    f"{doc_id}: {mention.surface!r} resolved to {mention.resolved}, "
                    f"gold says {expected}"
                )
        if doc_id in universe.hard_docs:
            continue
        for span, expected in gold.items():
            if expected != "NIL" and resolved_by_span.get(span) != expected:
                raise AssertionError(
                    f"{doc_id}: gold mention at {span} ({expected}) was not recovered"
                )


def _company_entity(row: dict):
    from ..kb.models import CompanyEntity

    return CompanyEntity(
        id=row["id"],
        canonical_name=row["canonical_name"],
        aliases=frozenset(row["aliases"]),
        country=row["country"],
        website=None,
        personnel=tuple((p, r) for p, r in row["personnel"]),
        phones=tuple(row["phones"]),
        last_harvested=None,
        domain_tags=frozenset(row["domain_tags"]),
    )


# -- output -------------------------------------------------------------------


def adapters_config() -> list[dict]:
    return [
        {
            "adapter_id": "fixture-registry",
            "query_url_template": "{base}/query?term={term}",
            "page_param": "page",
            "page_size": PAGE_SIZE,
            "empty_markers": ["No studies found"],
            "count_field": "count",
            "records_field": "records",
            "enabled": True,
        },
        {
            "adapter_id": "clinicaltrials-gov",
            "query_url_template": "https://clinicaltrials.gov/api/v2/studies?query.term={term}",
            "page_param": "page",
            "page_size": 100,
            "empty_markers": [],
            "enabled": False,
        },
        {
            "adapter_id": "eu-ctr",
            "query_url_template": "https://www.clinicaltrialsregister.eu/ctr-search/search?query={term}",
            "page_param": "page",
            "page_size": 20,
            "empty_markers": ["No trials were found"],
            "enabled": False,
        },
        {
            "adapter_id": "who-ictrp",
            "query_url_template": "https://trialsearch.who.int/api/search?title={term}",
            "page_param": "page",
            "page_size": 50,
            "empty_markers": [],
            "enabled": False,
        },
    ]


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def generate(data_dir: Path = DATA_DIR) -> Universe:
    rng = random.Random(SEED)
    universe = Universe()
    universe.companies = build_companies()
    universe.persons = build_persons()
    build_registry(universe, rng)
    check_cross_matching(universe)
    universe.gold_slots.extend(page_gold_slots())
    build_corpus(universe, rng)
    verify_corpus(universe)

    write_jsonl(data_dir / "companies.jsonl", [
        {k: v for k, v in c.items() if k != "trial_class"} for c in universe.companies
    ])
    write_jsonl(data_dir / "persons.jsonl", universe.persons)
    write_jsonl(data_dir / "registry.jsonl", universe.records)
    (data_dir / "adapters.json").write_text(
        json.dumps(adapters_config(), indent=2) + "\n", "utf-8"
    )

    sites_dir = data_dir / "sites"
    big_pages, graph = build_big_site("novagenix")
    for rel, html in big_pages.items():
        target = sites_dir / "novagenix" / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(html, "utf-8")
    for slug, pages in build_small_sites().items():
        for rel, html in pages.items():
            target = sites_dir / slug / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(html, "utf-8")
    robots_lines = ["User-agent: *"]
    for slug in sorted({*SITES.values()}):
        robots_lines.append(f"Disallow: /sites/{slug}/private/")
    (sites_dir / "robots.txt").write_text("\n".join(robots_lines) + "\n", "utf-8")
    (data_dir / "site_graph.json").write_text(json.dumps(graph, indent=2) + "\n", "utf-8")

    docs_dir = data_dir / "docs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    for doc_id, text in sorted(universe.docs.items()):
        (docs_dir / f"{doc_id}.txt").write_text(text, "utf-8")
    with (data_dir / "gold_mentions.tsv").open("w", encoding="utf-8") as fh:
        for doc_id, start, end, entity_id in universe.gold_mentions:
            fh.write(f"{doc_id}\t{start}\t{end}\t{entity_id}\n")
    with (data_dir / "gold_slots.tsv").open("w", encoding="utf-8") as fh:
        for subject, role, obj in universe.gold_slots:
            fh.write(f"{subject}\t{role}\t{obj}\n")

    manifest = {
        "seed": SEED,
        "page_size": PAGE_SIZE,
        "total_records": len(universe.records),
        "term_counts": universe.term_counts,
        "gold_mentions": len(universe.gold_mentions),
        "gold_slots": len(universe.gold_slots),
        "docs": len(universe.docs),
        "phase_vocabulary": sorted({r["phase"] for r in universe.records if "phase" in r}),
    }
    (data_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", "utf-8")
    return universe


if __name__ == "__main__":
    u = generate()
    print(
        f"generated {len(u.records)} records over {len(u.term_counts)} terms, "
        f"{len(u.gold_mentions)} gold mentions, {len(u.gold_slots)} gold slots"
    )
