from .bottleneck import bottleneck_log, bottleneck_log_by_dim, finite_bottleneck, scale_barcode
from .reduction import (Bar, Barcode, betti_numbers, is_acyclic, parse_barcode, read_barcode,
                        reduce, reduced_betti_numbers, write_barcode)
from .towers import ConversionStats, rank_oracle, tower_to_filtration

__all__ = [
    "Bar", "Barcode", "ConversionStats", "betti_numbers", "bottleneck_log",
    "bottleneck_log_by_dim", "finite_bottleneck", "is_acyclic", "parse_barcode", "rank_oracle",
    "read_barcode", "reduce", "reduced_betti_numbers", "scale_barcode", "tower_to_filtration",
    "write_barcode",
]
