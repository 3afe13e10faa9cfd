# Settings, logging, exceptions and the network model
