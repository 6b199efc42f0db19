# Packaged resources: stopwords.txt, lemmas.txt, api_catalog.txt
