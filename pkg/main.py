from ui.cli import cli

# 1. ENTRY POINT
# Subcommands live in ui/cli.py; engine settings come from MOCHECK_* environment variables.

if __name__ == '__main__':
    cli()
