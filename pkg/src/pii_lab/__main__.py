from pii_lab.cli import main

main()
