# One module per subcommand
