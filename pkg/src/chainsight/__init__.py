"""chainsight: supply-chain risk analysis over a knowledge graph.

Treats the supply-chain network as a knowledge graph, extracts
economically salient paths with centrality-guided traversal, verbalizes
structured data into prompt-ready context shells, and orchestrates a
two-agent retrieval loop over factor, news and graph modalities.
"""

__version__ = "0.1.0"

from .kg import (  # noqa: F401
    Edge,
    EdgeKind,
    KnowledgeGraph,
    Node,
    NodeKind,
    find_nodes_by_name,
    load_graph,
    neighbors,
    parse_graph,
    serialize_graph,
    validate,
)
from .centrality import CentralityTable, salience  # noqa: F401
from .traversal import (  # noqa: F401
    RiskPath,
    SeedMatch,
    TraversalConfig,
    extract_paths,
    hop_budget,
    resolve_seeds,
    traverse,
)
from .verbalizer import (  # noqa: F401
    ContextShell,
    FactorRecord,
    edge_phrase,
    render_factor_shell,
    render_node_shell,
    verbalize_path,
)
from .vecstore import (  # noqa: F401
    HashingEmbedder,
    VectorIndex,
    build_index,
    default_embed,
    search,
)
from .agents import (  # noqa: F401
    AgentTurn,
    MockBackend,
    OpenAIChatBackend,
    Portfolio,
    RetrievalStores,
    Session,
    ToolInvocation,
    run_turn,
)
