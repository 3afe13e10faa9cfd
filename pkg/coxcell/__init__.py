# coxcell: coverage of planar plus road-borne cellular networks
